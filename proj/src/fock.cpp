#include "kerrmi/fock.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace kerrmi::fock {

namespace {

std::string truncation_message(double captured, double budget) {
    std::ostringstream os;
    os.precision(10);
    os << "truncated basis captures norm " << captured << ", discarding more than the budget "
       << budget;
    return os.str();
}

std::vector<double> sqrt_table(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::sqrt(static_cast<double>(i));
    }
    return out;
}

std::vector<complex> kerr_phase_factors(std::size_t dim, double phi, double chi) {
    std::vector<complex> out(dim);
    for (std::size_t n = 0; n < dim; ++n) {
        const double dn = static_cast<double>(n);
        out[n] = std::polar(1.0, phi * (dn + 0.5 * chi * dn * dn));
    }
    return out;
}

struct RowMoments {
    double n1 = 0.0;
    double n2 = 0.0;
    double number = 0.0;
    complex cross{};
    complex pair{};
};

// Contributions of row n (first-mode occupation n) to every moment.
RowMoments row_moments(const TwoModeState& s, const std::vector<double>& root, std::size_t n) {
    const std::size_t d1 = s.dim1();
    const std::size_t d2 = s.dim2();
    const double dn = static_cast<double>(n);
    RowMoments r;
    for (std::size_t m = 0; m < d2; ++m) {
        const complex c = s(n, m);
        const double p = std::norm(c);
        const double dm = static_cast<double>(m);
        r.n1 += p * dn;
        r.n2 += p * dm;
        r.number += p * (2.0 * dn * dm + dn + dm);
        // a1^dag a2 |n, m> = sqrt(n+1) sqrt(m) |n+1, m-1>
        if (n + 1 < d1 && m >= 1) {
            r.cross += std::conj(s(n + 1, m - 1)) * (root[n + 1] * root[m]) * c;
        }
        // a1^dag^2 a2^2 |n, m> = sqrt((n+1)(n+2) m (m-1)) |n+2, m-2>
        if (n + 2 < d1 && m >= 2) {
            r.pair += std::conj(s(n + 2, m - 2)) *
                      (root[n + 1] * root[n + 2] * root[m] * root[m - 1]) * c;
        }
    }
    return r;
}

MomentSet assemble(double n1, double n2, double number, complex cross, complex pair,
                   double trunc_loss) {
    MomentSet out;
    out.mean_N1 = n1;
    out.mean_N2 = n2;
    out.number_part = number;
    out.cross_C = cross;
    out.pair_P = pair;
    // M = i(a2^dag a1 - a1^dag a2), <a2^dag a1> = conj(C)
    out.mean_M = 2.0 * cross.imag();
    // M^2 = 2 N1 N2 + N1 + N2 - a1^dag^2 a2^2 - a2^dag^2 a1^2
    out.mean_M2 = number - 2.0 * pair.real();
    out.trunc_loss = trunc_loss;
    return out;
}

struct BlockStats {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
};

constexpr std::size_t mc_block_size = 4096;

BlockStats sample_block(const std::function<double(double)>& fn, double sigma,
                        std::size_t count, std::uint64_t seed) {
    BlockStats b;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma > 0.0 ? sigma : 1.0);
    for (std::size_t i = 0; i < count; ++i) {
        const double phi = sigma > 0.0 ? normal(rng) : 0.0;
        const double v = fn(phi);
        ++b.count;
        const double delta = v - b.mean;
        b.mean += delta / static_cast<double>(b.count);
        b.m2 += delta * (v - b.mean);
    }
    return b;
}

MonteCarloEstimate combine_blocks(const std::vector<BlockStats>& blocks) {
    BlockStats acc;
    for (const auto& b : blocks) {
        if (b.count == 0) {
            continue;
        }
        const double na = static_cast<double>(acc.count);
        const double nb = static_cast<double>(b.count);
        const double n = na + nb;
        const double delta = b.mean - acc.mean;
        acc.mean += delta * nb / n;
        acc.m2 += b.m2 + delta * delta * na * nb / n;
        acc.count += b.count;
    }
    MonteCarloEstimate out;
    out.mean = acc.mean;
    out.samples = acc.count;
    if (acc.count >= 2) {
        const double var = acc.m2 / static_cast<double>(acc.count - 1);
        out.std_error = std::sqrt(var / static_cast<double>(acc.count));
    }
    return out;
}

void check_samples(double sigma, std::size_t samples) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ValidationError("sigma", "must be finite and non-negative");
    }
    if (samples < 2) {
        throw ValidationError("samples", "need at least 2 samples");
    }
}

}  // namespace

TruncationError::TruncationError(double captured, double budget)
    : std::runtime_error(truncation_message(captured, budget)),
      captured_(captured),
      budget_(budget) {}

std::size_t default_dimension(double mean_photons, double margin) {
    const double mu = std::max(mean_photons, 0.0);
    const double d = std::ceil(mu + 10.0 * std::sqrt(mu) + margin);
    return std::max<std::size_t>(1, static_cast<std::size_t>(d));
}

double CoherentVector::captured_norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) {
        s += std::norm(a);
    }
    return s;
}

CoherentVector coherent_vector(complex beta, std::size_t dim, double budget) {
    if (dim == 0) {
        throw ValidationError("dim", "truncation dimension must be >= 1");
    }
    CoherentVector out;
    out.amplitudes.assign(dim, complex{});
    const double mu = std::norm(beta);
    if (mu == 0.0) {
        out.amplitudes[0] = 1.0;
        return out;
    }

    const double log_abs = 0.5 * std::log(mu);
    const double theta = std::arg(beta);
    // log|c_n| = -mu/2 + n log|beta| - log(n!)/2, accumulated term by term.
    double log_mag = -0.5 * mu;
    out.amplitudes[0] = std::exp(log_mag);
    for (std::size_t n = 1; n < dim; ++n) {
        log_mag += log_abs - 0.5 * std::log(static_cast<double>(n));
        out.amplitudes[n] = std::polar(std::exp(log_mag), static_cast<double>(n) * theta);
    }

    // Tail mass: continue the recurrence past the cutoff until the Poisson
    // terms are negligible against what has been accumulated.
    double tail = 0.0;
    const std::size_t hard_stop = dim + 64 + static_cast<std::size_t>(20.0 * (mu + 10.0));
    for (std::size_t n = dim; n < hard_stop; ++n) {
        log_mag += log_abs - 0.5 * std::log(static_cast<double>(n));
        const double p = std::exp(2.0 * log_mag);
        tail += p;
        if (static_cast<double>(n) > mu && (p <= tail * 1e-17 || p < 1e-300)) {
            break;
        }
    }
    out.tail_mass = tail;
    if (tail > budget) {
        throw TruncationError(1.0 - tail, budget);
    }
    return out;
}

TwoModeState::TwoModeState(std::size_t dim1, std::size_t dim2)
    : dim1_(dim1), dim2_(dim2), coeffs_(dim1 * dim2) {
    if (dim1 == 0 || dim2 == 0) {
        throw ValidationError("dim", "two-mode dimensions must be >= 1");
    }
}

TwoModeState::TwoModeState(std::size_t dim1, std::size_t dim2, std::vector<complex> coeffs,
                           double truncation_loss)
    : dim1_(dim1), dim2_(dim2), coeffs_(std::move(coeffs)), truncation_loss_(truncation_loss) {
    if (dim1 == 0 || dim2 == 0) {
        throw ValidationError("dim", "two-mode dimensions must be >= 1");
    }
    if (coeffs_.size() != dim1 * dim2) {
        throw ValidationError("coeffs", "size does not match dim1 * dim2");
    }
}

double TwoModeState::norm_squared() const {
    double s = 0.0;
    for (const auto& c : coeffs_) {
        s += std::norm(c);
    }
    return s;
}

TwoModeState product_input(complex alpha, std::size_t dim, double budget) {
    const complex beta = alpha / std::sqrt(2.0);
    if (dim == 0) {
        dim = default_dimension(std::norm(beta));
    }
    // Split the budget between the two modes.
    const auto mode = coherent_vector(beta, dim, budget / 2.0);
    const auto& v = mode.amplitudes;
    std::vector<complex> coeffs(dim * dim);
    for (std::size_t n = 0; n < dim; ++n) {
        for (std::size_t m = 0; m < dim; ++m) {
            coeffs[n * dim + m] = v[n] * v[m];
        }
    }
    const double t = mode.tail_mass;
    return TwoModeState(dim, dim, std::move(coeffs), 2.0 * t - t * t);
}

TwoModeState apply_kerr(const TwoModeState& state, double phi1, double phi2, double chi) {
    const auto u1 = kerr_phase_factors(state.dim1_, phi1, chi);
    const auto u2 = kerr_phase_factors(state.dim2_, phi2, chi);
    TwoModeState out = state;
    const auto rows = static_cast<std::int64_t>(state.dim1_);
    const std::size_t d2 = state.dim2_;
#pragma omp parallel for schedule(static)
    for (std::int64_t n = 0; n < rows; ++n) {
        const auto un = static_cast<std::size_t>(n);
        for (std::size_t m = 0; m < d2; ++m) {
            out.coeffs_[un * d2 + m] *= u1[un] * u2[m];
        }
    }
    return out;
}

TwoModeState apply_kerr_serial(const TwoModeState& state, double phi1, double phi2,
                               double chi) {
    TwoModeState out = state;
    for (std::size_t n = 0; n < state.dim1_; ++n) {
        const double dn = static_cast<double>(n);
        for (std::size_t m = 0; m < state.dim2_; ++m) {
            const double dm = static_cast<double>(m);
            const double phase =
                phi1 * (dn + 0.5 * chi * dn * dn) + phi2 * (dm + 0.5 * chi * dm * dm);
            out.coeffs_[n * state.dim2_ + m] *= std::polar(1.0, phase);
        }
    }
    return out;
}

TwoModeState apply_phase_offset(const TwoModeState& state, double phi) {
    TwoModeState out = state;
    const auto u2 = kerr_phase_factors(state.dim2_, phi, 0.0);
    for (std::size_t n = 0; n < state.dim1_; ++n) {
        for (std::size_t m = 0; m < state.dim2_; ++m) {
            out.coeffs_[n * state.dim2_ + m] *= u2[m];
        }
    }
    return out;
}

MomentSet moments(const TwoModeState& state) {
    const auto root = sqrt_table(std::max(state.dim1(), state.dim2()) + 1);
    std::vector<RowMoments> rows(state.dim1());
    const auto count = static_cast<std::int64_t>(state.dim1());
#pragma omp parallel for schedule(static)
    for (std::int64_t n = 0; n < count; ++n) {
        rows[static_cast<std::size_t>(n)] = row_moments(state, root, static_cast<std::size_t>(n));
    }
    RowMoments total;
    for (const auto& r : rows) {
        total.n1 += r.n1;
        total.n2 += r.n2;
        total.number += r.number;
        total.cross += r.cross;
        total.pair += r.pair;
    }
    return assemble(total.n1, total.n2, total.number, total.cross, total.pair,
                    state.truncation_loss());
}

MomentSet moments_serial(const TwoModeState& state) {
    const std::size_t d1 = state.dim1();
    const std::size_t d2 = state.dim2();
    double n1 = 0.0;
    double n2 = 0.0;
    double number = 0.0;
    complex cross{};
    complex pair{};
    for (std::size_t n = 0; n < d1; ++n) {
        for (std::size_t m = 0; m < d2; ++m) {
            const complex c = state(n, m);
            const double p = std::norm(c);
            const double dn = static_cast<double>(n);
            const double dm = static_cast<double>(m);
            n1 += p * dn;
            n2 += p * dm;
            number += p * (2.0 * dn * dm + dn + dm);
            if (n + 1 < d1 && m >= 1) {
                cross += std::conj(state(n + 1, m - 1)) * std::sqrt((dn + 1.0) * dm) * c;
            }
            if (n + 2 < d1 && m >= 2) {
                pair += std::conj(state(n + 2, m - 2)) *
                        std::sqrt((dn + 1.0) * (dn + 2.0) * dm * (dm - 1.0)) * c;
            }
        }
    }
    return assemble(n1, n2, number, cross, pair, state.truncation_loss());
}

MomentSet noisy_moments(const MomentSet& noiseless, const NoiseSpec& noise) {
    noise.validate();
    const double eta = noise.eta;
    const double first = std::exp(-0.5 * noise.sigma * noise.sigma);   // E[e^{i phi}]
    const double second = std::exp(-2.0 * noise.sigma * noise.sigma);  // E[e^{2 i phi}]

    MomentSet out = noiseless;
    out.cross_C = eta * first * noiseless.cross_C;
    out.pair_P = eta * eta * second * noiseless.pair_P;
    out.mean_M = eta * first * noiseless.mean_M;
    // eta^2 <M0^2>_phi + eta (1 - eta) [(2 n_b + 1) N1 + (2 n_b + 1) N2], with
    // (1 - eta) n_b = N_t / 2 per thermal mode.
    const double phase_averaged = noiseless.number_part - 2.0 * second * noiseless.pair_P.real();
    const double photons = noiseless.mean_N1 + noiseless.mean_N2;
    out.mean_M2 = eta * eta * phase_averaged + eta * photons * (noise.thermal_nt + 1.0 - eta);
    return out;
}

IdentityCheck verify_A3(complex beta, double z, std::size_t dim, double budget) {
    const auto v = coherent_vector(beta, dim, budget).amplitudes;
    complex direct{};
    for (std::size_t n = 0; n + 1 < dim; ++n) {
        const complex phase = std::polar(1.0, 2.0 * z * static_cast<double>(n));
        direct += std::conj(v[n]) * phase * std::sqrt(static_cast<double>(n + 1)) * v[n + 1];
    }
    const double mu = std::norm(beta);
    const complex closed = beta * std::exp(mu * (std::polar(1.0, 2.0 * z) - 1.0));
    return {direct, closed, std::abs(direct - closed)};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

MonteCarloEstimate monte_carlo_phase(const std::function<double(double)>& fn, double sigma,
                                     std::size_t samples, std::uint64_t seed) {
    check_samples(sigma, samples);
    const std::size_t nblocks = (samples + mc_block_size - 1) / mc_block_size;
    std::vector<BlockStats> blocks(nblocks);
    const auto count = static_cast<std::int64_t>(nblocks);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < count; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        const std::size_t n = std::min(mc_block_size, samples - ub * mc_block_size);
        blocks[ub] = sample_block(fn, sigma, n, mix_seed(seed, ub));
    }
    return combine_blocks(blocks);
}

MonteCarloEstimate monte_carlo_phase_serial(const std::function<double(double)>& fn,
                                            double sigma, std::size_t samples,
                                            std::uint64_t seed) {
    check_samples(sigma, samples);
    std::vector<BlockStats> blocks;
    for (std::size_t start = 0, b = 0; start < samples; start += mc_block_size, ++b) {
        const std::size_t n = std::min(mc_block_size, samples - start);
        blocks.push_back(sample_block(fn, sigma, n, mix_seed(seed, b)));
    }
    return combine_blocks(blocks);
}

}  // namespace kerrmi::fock
