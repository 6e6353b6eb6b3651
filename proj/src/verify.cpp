#include "kerrmi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kerrmi/analytic.hpp"
#include "kerrmi/core.hpp"
#include "kerrmi/fock.hpp"

namespace kerrmi::verify {

namespace {

using fock::complex;

struct PhaseSetting {
    double phi1;
    double phi2;
    double offset;
};

// The last setting is replaced by the operating point z0 = pi when chi > 0.
constexpr PhaseSetting phase_settings[] = {
    {0.0, 0.0, 0.0},
    {0.30, 0.32, 0.0},
    {0.30, 0.32, 0.7},
    {1.1, -0.4, 0.25},
    {5.0, 5.1, 0.0},
};

double operating_phase(double chi) { return chi > 0.0 ? 2.0 * std::numbers::pi / chi : 0.9; }

double scaled_error(double oracle, double reference) {
    return std::abs(oracle - reference) / std::max(std::abs(reference), 1.0);
}

double scaled_error(complex oracle, complex reference) {
    return std::abs(oracle - reference) / std::max(std::abs(reference), 1.0);
}

fock::TwoModeState input_state(int photons, double margin) {
    const double mu = static_cast<double>(photons) / 2.0;
    return fock::product_input(std::sqrt(static_cast<double>(photons)),
                               fock::default_dimension(mu, margin));
}

// Runs `body(i)` for every index in parallel and keeps the largest result.
template <typename Body>
double parallel_max(std::size_t count, Body body) {
    std::vector<double> errors(count, 0.0);
    const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        errors[static_cast<std::size_t>(i)] = body(static_cast<std::size_t>(i));
    }
    double worst = 0.0;
    for (double e : errors) {
        // NaN must not be masked by std::max.
        if (std::isnan(e)) {
            return std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, e);
    }
    return worst;
}

CaseResult tolerance_result(Case which, std::size_t checks, double worst, double tolerance) {
    return CaseResult{which, checks, worst, tolerance, "rel_error", worst < tolerance};
}

CaseResult check_mean(const Config& cfg, const std::vector<int>& photons) {
    struct Item {
        int n;
        double chi;
        PhaseSetting setting;
    };
    std::vector<Item> items;
    for (int n : photons) {
        for (double chi : chi_grid) {
            for (std::size_t s = 0; s < std::size(phase_settings); ++s) {
                PhaseSetting ps = phase_settings[s];
                if (s + 1 == std::size(phase_settings) && chi > 0.0) {
                    const double op = operating_phase(chi);
                    ps = {op - 0.05, op + 0.05, 0.0};
                }
                items.push_back({n, chi, ps});
            }
        }
    }
    const double worst = parallel_max(items.size(), [&](std::size_t i) {
        const auto& it = items[i];
        auto state = fock::apply_kerr(input_state(it.n, cfg.dim_margin), it.setting.phi1,
                                      it.setting.phi2, it.chi);
        state = fock::apply_phase_offset(state, it.setting.offset);
        const double oracle = fock::moments(state).mean_M;
        const double closed = analytic::mean_M_exact(it.n, it.chi, it.setting.phi1,
                                                     it.setting.phi2, it.setting.offset, 1.0);
        return scaled_error(oracle, closed);
    });
    return tolerance_result(Case::mean, items.size(), worst, cfg.tolerance);
}

CaseResult check_a3(const Config& cfg, const std::vector<int>& photons) {
    struct Item {
        complex beta;
        double z;
    };
    std::vector<Item> items;
    for (int n : photons) {
        const double mu = std::min(static_cast<double>(n) / 2.0, 10.0);
        for (double arg : {0.0, 0.9}) {
            for (int k = 0; k <= 8; ++k) {
                items.push_back({std::polar(std::sqrt(mu), arg), std::numbers::pi * k / 8.0});
            }
        }
    }
    const double worst = parallel_max(items.size(), [&](std::size_t i) {
        const auto& it = items[i];
        const auto dim = fock::default_dimension(std::norm(it.beta), cfg.dim_margin);
        const auto check = fock::verify_A3(it.beta, it.z, dim);
        return scaled_error(check.direct, check.closed_form);
    });
    return tolerance_result(Case::a3, items.size(), worst, cfg.tolerance);
}

CaseResult check_m2(const Config& cfg, const std::vector<int>& photons) {
    struct Item {
        int n;
        double chi;
        double offset;
    };
    std::vector<Item> items;
    for (int n : photons) {
        for (double chi : chi_grid) {
            for (int k = 0; k < 8; ++k) {
                items.push_back({n, chi, 0.2 + 0.4 * k});
            }
        }
    }
    const double worst = parallel_max(items.size(), [&](std::size_t i) {
        const auto& it = items[i];
        const double op = operating_phase(it.chi);
        auto state = fock::apply_kerr(input_state(it.n, cfg.dim_margin), op, op, it.chi);
        state = fock::apply_phase_offset(state, it.offset);
        const double oracle = fock::moments(state).mean_M2;
        return scaled_error(oracle, analytic::mean_M0_squared(it.n, it.offset));
    });
    return tolerance_result(Case::m2, items.size(), worst, cfg.tolerance);
}

CaseResult check_gauss(const Config& cfg, const std::vector<int>& photons) {
    // Monte Carlo over the random phase, compared with the analytic factors
    // e^{-sigma^2/2} and e^{-2 sigma^2}: first on the bare harmonics, then on
    // the oracle's first and second moments.
    const int n = photons.back();
    const double chi = 0.1;
    const auto state = fock::apply_kerr(input_state(n, cfg.dim_margin), 0.30, 0.32, chi);
    const auto noiseless = fock::moments(state);

    struct Item {
        std::function<double(double)> fn;
        double sigma;
        double target;
    };
    std::vector<Item> items;
    const double c = 0.6;
    for (double sigma : {0.1, 0.3}) {
        const auto averaged = fock::noisy_moments(noiseless, NoiseSpec{1.0, sigma, 0.0});
        items.push_back({[c](double phi) { return std::sin(phi + c); }, sigma,
                         std::exp(-sigma * sigma / 2.0) * std::sin(c)});
        items.push_back({[](double phi) { return std::cos(2.0 * phi); }, sigma,
                         std::exp(-2.0 * sigma * sigma)});
        items.push_back({[C = noiseless.cross_C](double phi) {
                             return 2.0 * (std::polar(1.0, phi) * C).imag();
                         },
                         sigma, averaged.mean_M});
        items.push_back({[P = noiseless.pair_P, num = noiseless.number_part](double phi) {
                             return num - 2.0 * (std::polar(1.0, 2.0 * phi) * P).real();
                         },
                         sigma, averaged.mean_M2});
    }

    double worst = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto est = fock::monte_carlo_phase(items[i].fn, items[i].sigma, cfg.mc_samples,
                                                 fock::mix_seed(cfg.seed, i));
        const double diff = std::abs(est.mean - items[i].target);
        double z = 0.0;
        if (est.std_error > 0.0) {
            z = diff / est.std_error;
        } else if (diff > 0.0) {
            z = std::numeric_limits<double>::infinity();
        }
        worst = std::max(worst, z);
    }
    return CaseResult{Case::gauss, items.size(), worst, cfg.mc_sigma_limit, "z_score",
                      worst < cfg.mc_sigma_limit};
}

CaseResult check_noise(const Config& cfg, const std::vector<int>& photons) {
    struct Item {
        int n;
        double chi;
        NoiseSpec noise;
    };
    std::vector<Item> items;
    for (int n : photons) {
        for (double chi : {0.0, 0.1}) {
            for (double eta : {0.5, 1.0}) {
                for (double sigma : {0.0, 0.05, 0.2}) {
                    for (double nt : {0.0, 2.0}) {
                        items.push_back({n, chi, NoiseSpec{eta, sigma, nt}});
                    }
                }
            }
        }
    }
    const double worst = parallel_max(items.size(), [&](std::size_t i) {
        const auto& it = items[i];
        const double op = operating_phase(it.chi);
        const double dn = it.n;
        const auto& nz = it.noise;
        const auto state = fock::apply_kerr(input_state(it.n, cfg.dim_margin), op, op, it.chi);
        const auto noisy = fock::noisy_moments(fock::moments(state), nz);

        // Exact phase average, then the small-sigma form with its sigma^4 bound.
        const double exact = analytic::var_M(dn, it.chi, nz.eta, nz.sigma, nz.thermal_nt,
                                             analytic::VarianceForm::exact_phase_average);
        const double small = analytic::var_M(dn, it.chi, nz.eta, nz.sigma, nz.thermal_nt);
        const double bound = std::pow(nz.eta * dn * nz.sigma * nz.sigma, 2);
        const double excess = std::max(0.0, std::abs(noisy.mean_M2 - small) - bound) /
                              std::max(std::abs(small), 1.0);
        const double mean_error = std::abs(noisy.mean_M) / std::max(dn, 1.0);
        return std::max({scaled_error(noisy.mean_M2, exact), excess, mean_error});
    });
    return tolerance_result(Case::noise, items.size(), worst, cfg.tolerance);
}

}  // namespace

std::string_view case_name(Case c) {
    switch (c) {
        case Case::mean: return "mean";
        case Case::a3: return "a3";
        case Case::m2: return "m2";
        case Case::gauss: return "gauss";
        case Case::noise: return "noise";
    }
    return "?";
}

void Config::validate() const {
    if (max_photons < 0 || max_photons > 30) {
        throw ValidationError("max-photons", "must lie in [0, 30]");
    }
    if (!(dim_margin >= 0.0) || !std::isfinite(dim_margin)) {
        throw ValidationError("dim-margin", "must be finite and non-negative");
    }
    if (!(tolerance >= 0.0)) {
        throw ValidationError("tolerance", "must be non-negative");
    }
    if (mc_samples < 2) {
        throw ValidationError("samples", "need at least 2 Monte Carlo samples");
    }
}

bool Report::passed() const {
    return std::all_of(cases.begin(), cases.end(), [](const auto& c) { return c.passed; });
}

std::vector<int> photon_grid(int max_photons) {
    std::vector<int> out;
    for (int k = 1; k * k <= max_photons; ++k) {
        out.push_back(k * k);
    }
    if (out.empty()) {
        out.push_back(0);
    }
    return out;
}

Report run(const Config& config) {
    config.validate();
    const auto photons = photon_grid(config.max_photons);
    Report report;
    for (Case c : config.cases) {
        switch (c) {
            case Case::mean: report.cases.push_back(check_mean(config, photons)); break;
            case Case::a3: report.cases.push_back(check_a3(config, photons)); break;
            case Case::m2: report.cases.push_back(check_m2(config, photons)); break;
            case Case::gauss: report.cases.push_back(check_gauss(config, photons)); break;
            case Case::noise: report.cases.push_back(check_noise(config, photons)); break;
        }
    }
    return report;
}

}  // namespace kerrmi::verify
