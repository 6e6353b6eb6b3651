#include "kerrmi/sweep.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <utility>

namespace kerrmi::sweep {

namespace {

constexpr std::array<std::pair<Axis, std::string_view>, 10> axis_names{{
    {Axis::tau, "tau"},
    {Axis::area, "area"},
    {Axis::power, "power"},
    {Axis::n2, "n2"},
    {Axis::wavelength, "wavelength"},
    {Axis::eta, "eta"},
    {Axis::sigma, "sigma"},
    {Axis::nt, "nt"},
    {Axis::arm_length, "arm_length"},
    {Axis::signal_x, "signal_x"},
}};

double& slot(Parameters& p, Axis axis) {
    switch (axis) {
        case Axis::tau: return p.pulse.tau_s;
        case Axis::area: return p.pulse.area_m2;
        case Axis::power: return p.pulse.power_w;
        case Axis::n2: return p.medium.n2_m2_per_w;
        case Axis::wavelength: return p.pulse.wavelength_m;
        case Axis::eta: return p.noise.eta;
        case Axis::sigma: return p.noise.sigma;
        case Axis::nt: return p.noise.thermal_nt;
        case Axis::arm_length: return p.geometry.arm_length_m;
        case Axis::signal_x: return p.geometry.signal_x_m;
    }
    return p.pulse.tau_s;
}

double parse_number(std::string_view text, const std::string& field) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ValidationError(field, "cannot parse number '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

struct Plan {
    std::vector<std::vector<double>> axis_values;
    std::vector<Parameters> rows;
};

Plan plan_rows(const Parameters& base, const std::vector<GridSpec>& grids,
               const SweepOptions& options) {
    if (grids.size() > max_axes) {
        throw ValidationError("grid", "at most 3 grid axes are supported");
    }
    for (std::size_t i = 0; i < grids.size(); ++i) {
        grids[i].validate();
        for (std::size_t j = 0; j < i; ++j) {
            if (grids[i].axis == grids[j].axis) {
                throw ValidationError("grid", "axis '" + std::string(axis_name(grids[i].axis)) +
                                                  "' given twice");
            }
        }
        if (options.hold_photons && grids[i].axis == Axis::power) {
            throw ValidationError("grid", "cannot sweep power while holding the photon number");
        }
    }
    base.validate();

    Plan plan;
    std::size_t total = 1;
    for (const auto& g : grids) {
        plan.axis_values.push_back(g.values());
        if (total > options.row_cap / g.points) {
            throw ValidationError("grid", "row count exceeds cap of " +
                                              std::to_string(options.row_cap));
        }
        total *= g.points;
    }
    if (total > options.row_cap) {
        throw ValidationError("grid", "row count exceeds cap of " + std::to_string(options.row_cap));
    }

    const double base_photons = derive(base.pulse, base.medium).photons;
    plan.rows.reserve(total);
    std::vector<std::size_t> index(grids.size(), 0);
    for (std::size_t r = 0; r < total; ++r) {
        std::size_t rem = r;
        for (std::size_t a = grids.size(); a-- > 0;) {
            index[a] = rem % grids[a].points;
            rem /= grids[a].points;
        }
        Parameters p = base;
        for (std::size_t a = 0; a < grids.size(); ++a) {
            slot(p, grids[a].axis) = plan.axis_values[a][index[a]];
        }
        if (options.hold_photons) {
            p.pulse.power_w = power_for_photons(p.pulse, base_photons);
        }
        p.validate();
        plan.rows.push_back(p);
    }
    return plan;
}

}  // namespace

std::string_view axis_name(Axis axis) {
    for (const auto& [a, name] : axis_names) {
        if (a == axis) {
            return name;
        }
    }
    return "?";
}

std::optional<Axis> parse_axis(std::string_view name) {
    for (const auto& [a, n] : axis_names) {
        if (n == name) {
            return a;
        }
    }
    return std::nullopt;
}

void GridSpec::validate() const {
    const std::string field = "grid " + std::string(axis_name(axis));
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw ValidationError(field, "requires finite lo < hi");
    }
    if (points < 2) {
        throw ValidationError(field, "requires at least 2 points");
    }
    if (spacing == Spacing::log && !(lo > 0.0)) {
        throw ValidationError(field, "log spacing requires lo > 0");
    }
}

std::vector<double> GridSpec::values() const {
    validate();
    std::vector<double> out(points);
    const double last = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / last;
        if (spacing == Spacing::linear) {
            out[i] = lo + (hi - lo) * t;
        } else {
            out[i] = lo * std::pow(hi / lo, t);
        }
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

GridSpec GridSpec::parse(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw ValidationError("grid", "expected name=lo:hi:points[:linear|log], got '" +
                                          std::string(text) + "'");
    }
    const auto name = text.substr(0, eq);
    const auto axis = parse_axis(name);
    if (!axis) {
        throw ValidationError("grid", "unknown parameter '" + std::string(name) + "'");
    }
    const auto parts = split(text.substr(eq + 1), ':');
    if (parts.size() != 3 && parts.size() != 4) {
        throw ValidationError("grid", "expected lo:hi:points[:linear|log] for '" +
                                          std::string(name) + "'");
    }
    GridSpec g;
    g.axis = *axis;
    const std::string field = "grid " + std::string(name);
    g.lo = parse_number(parts[0], field);
    g.hi = parse_number(parts[1], field);
    const double points = parse_number(parts[2], field);
    if (!(points >= 2.0) || points != std::floor(points) || points > 1e9) {
        throw ValidationError(field, "points must be an integer >= 2");
    }
    g.points = static_cast<std::size_t>(points);
    if (parts.size() == 4) {
        if (parts[3] == "log") {
            g.spacing = Spacing::log;
        } else if (parts[3] == "linear" || parts[3] == "lin") {
            g.spacing = Spacing::linear;
        } else {
            throw ValidationError(field, "spacing must be linear or log");
        }
    }
    g.validate();
    return g;
}

SweepRow evaluate(const Parameters& params, const analytic::Thresholds& thresholds) {
    params.validate();
    SweepRow row;
    row.inputs = params;
    row.derived = derive(params.pulse, params.medium);
    row.report = analytic::sensitivity(row.derived, params.geometry, params.noise, thresholds);
    return row;
}

std::vector<SweepRow> run_sweep(const Parameters& base, const std::vector<GridSpec>& grids,
                                const SweepOptions& options) {
    const auto plan = plan_rows(base, grids, options);
    std::vector<SweepRow> rows(plan.rows.size());
    const auto count = static_cast<std::int64_t>(rows.size());
    // Inputs were validated while planning; evaluation cannot throw.
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        rows[u] = evaluate(plan.rows[u], options.thresholds);
    }
    return rows;
}

std::vector<SweepRow> run_sweep_serial(const Parameters& base,
                                       const std::vector<GridSpec>& grids,
                                       const SweepOptions& options) {
    const auto plan = plan_rows(base, grids, options);
    std::vector<SweepRow> rows;
    rows.reserve(plan.rows.size());
    for (const auto& p : plan.rows) {
        rows.push_back(evaluate(p, options.thresholds));
    }
    return rows;
}

RegimeReport regime_report(std::string_view preset_name, std::int64_t m,
                           const analytic::Thresholds& thresholds) {
    const auto& preset = kerrmi::preset(preset_name);
    RegimeReport out;
    out.name = std::string(preset.name);
    out.m = m;

    auto params = preset.parameters(0.0);
    const auto derived = derive(params.pulse, params.medium);
    out.arm_length_m = operating_arm_length(derived, m);
    params.geometry.arm_length_m = out.arm_length_m;
    out.row = evaluate(params, thresholds);

    const double n = derived.photons;
    const double chi_n = derived.chi * n;
    out.x_min_m = out.row.report.delta_x;
    out.x_max_m = 1.0 / (chi_n * derived.wavenumber);
    out.sigma_max = derived.chi * std::sqrt(n / params.noise.eta);
    out.nt_max = chi_n * chi_n;
    out.impractical = out.arm_length_m > practical_arm_limit_m;
    if (out.impractical) {
        out.note = "operating point needs an impractically long interferometer; "
                   "the m = 0 configuration with a compensating opposite-sign Kerr medium "
                   "is not modelled";
    }
    return out;
}

}  // namespace kerrmi::sweep
