#include "kerrmi/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "kerrmi/analytic.hpp"
#include "kerrmi/core.hpp"
#include "kerrmi/fock.hpp"
#include "kerrmi/verify.hpp"

namespace kerrmi::cli {

using json = nlohmann::ordered_json;

namespace {

struct GlobalFlags {
    std::string output;
    std::string format;
    double threshold = 1e-2;
    std::uint64_t seed = 42;
    CLI::Option* seed_opt = nullptr;
};

// Physical flags shared by estimate and sweep. Options record whether they
// were given so a regime preset can be partially overridden.
struct PhysicalFlags {
    std::string regime;
    double wavelength = 0.0;
    double tau = 0.0;
    double area = 0.0;
    double power = 0.0;
    std::string n2;
    double n0 = 1.0;
    double eta = 1.0;
    double sigma = 0.0;
    double nt = 0.0;
    double arm_length = 0.0;
    double signal = 0.0;
    std::int64_t order = 1;

    CLI::Option* wavelength_opt = nullptr;
    CLI::Option* tau_opt = nullptr;
    CLI::Option* area_opt = nullptr;
    CLI::Option* power_opt = nullptr;
    CLI::Option* n2_opt = nullptr;
    CLI::Option* n0_opt = nullptr;
    CLI::Option* eta_opt = nullptr;
    CLI::Option* sigma_opt = nullptr;
    CLI::Option* nt_opt = nullptr;
    CLI::Option* arm_opt = nullptr;
    CLI::Option* signal_opt = nullptr;
    CLI::Option* regime_opt = nullptr;
};

void add_physical_flags(CLI::App& cmd, PhysicalFlags& f) {
    f.regime_opt = cmd.add_option("--regime", f.regime, "Preset: natural | giant-eit");
    f.wavelength_opt = cmd.add_option("--wavelength", f.wavelength, "Wavelength [m]");
    f.tau_opt = cmd.add_option("--tau", f.tau, "Pulse duration [s]");
    f.area_opt = cmd.add_option("--area", f.area, "Beam cross section [m^2]");
    f.power_opt = cmd.add_option("--power", f.power, "Pulse power [W]");
    f.n2_opt = cmd.add_option("--n2", f.n2, "Kerr coefficient [cm^2/W], or suffix cm2/W | m2/W");
    f.n0_opt = cmd.add_option("--n0", f.n0, "Linear refractive index");
    f.eta_opt = cmd.add_option("--eta", f.eta, "Detector efficiency (0, 1]");
    f.sigma_opt = cmd.add_option("--sigma", f.sigma, "Phase-randomization std deviation [rad]");
    f.nt_opt = cmd.add_option("--nt", f.nt, "Mean thermal photon number");
    f.arm_opt = cmd.add_option("--arm-length", f.arm_length,
                               "Arm length l0 [m] (default: operating point z0 = m pi)");
    f.signal_opt = cmd.add_option("--signal", f.signal, "Signal displacement x [m]");
    cmd.add_option("--order", f.order, "Operating point order m for the default arm length")
        ->check(CLI::PositiveNumber);
}

Parameters resolve(const PhysicalFlags& f) {
    Parameters p;
    bool have_pulse[4] = {false, false, false, false};
    bool have_n2 = false;
    if (f.regime_opt->count() > 0) {
        const auto& preset = kerrmi::preset(f.regime);
        p = preset.parameters(0.0);
        std::fill(std::begin(have_pulse), std::end(have_pulse), true);
        have_n2 = true;
    }
    auto take = [](CLI::Option* opt, double value, double& target, bool* flag = nullptr) {
        if (opt->count() > 0) {
            target = value;
            if (flag != nullptr) {
                *flag = true;
            }
        }
    };
    take(f.wavelength_opt, f.wavelength, p.pulse.wavelength_m, &have_pulse[0]);
    take(f.tau_opt, f.tau, p.pulse.tau_s, &have_pulse[1]);
    take(f.area_opt, f.area, p.pulse.area_m2, &have_pulse[2]);
    take(f.power_opt, f.power, p.pulse.power_w, &have_pulse[3]);
    if (f.n2_opt->count() > 0) {
        p.medium.n2_m2_per_w = parse_n2(f.n2);
        have_n2 = true;
    }
    take(f.n0_opt, f.n0, p.medium.n0);
    take(f.eta_opt, f.eta, p.noise.eta);
    take(f.sigma_opt, f.sigma, p.noise.sigma);
    take(f.nt_opt, f.nt, p.noise.thermal_nt);
    take(f.signal_opt, f.signal, p.geometry.signal_x_m);

    constexpr const char* pulse_flags[] = {"--wavelength", "--tau", "--area", "--power"};
    for (int i = 0; i < 4; ++i) {
        if (!have_pulse[i]) {
            throw ValidationError(pulse_flags[i] + 2, std::string("missing flag ") + pulse_flags[i] +
                                                          " (or give --regime)");
        }
    }
    if (!have_n2) {
        throw ValidationError("n2", "missing flag --n2 (or give --regime)");
    }

    if (f.arm_opt->count() > 0) {
        p.geometry.arm_length_m = f.arm_length;
    } else {
        const auto d = derive(p.pulse, p.medium);
        p.geometry.arm_length_m = d.chi > 0.0 ? operating_arm_length(d, f.order) : 1.0;
    }
    p.validate();
    return p;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json parameters_json(const Parameters& p) {
    return json{
        {"wavelength_m", p.pulse.wavelength_m},
        {"tau_s", p.pulse.tau_s},
        {"area_m2", p.pulse.area_m2},
        {"power_w", p.pulse.power_w},
        {"n0", p.medium.n0},
        {"n2_m2_per_w", p.medium.n2_m2_per_w},
        {"eta", p.noise.eta},
        {"sigma", p.noise.sigma},
        {"nt", p.noise.thermal_nt},
        {"arm_length_m", p.geometry.arm_length_m},
        {"signal_x_m", p.geometry.signal_x_m},
    };
}

json manifest(const std::vector<std::string>& args, json parameters,
              std::optional<std::uint64_t> seed) {
    json m;
    m["tool"] = "kerrmi";
    m["version"] = KERRMI_VERSION;
    m["command"] = args;
    m["parameters"] = std::move(parameters);
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["timestamp"] = timestamp_utc();
    return m;
}

json validity_json(const analytic::ValidityFlags& v) {
    return json{
        {"margin_small_signal", v.margin_small_signal},
        {"margin_thermal", v.margin_thermal},
        {"margin_dephasing", v.margin_dephasing},
        {"margin_operating_point", v.margin_operating_point},
        {"margin_nl_dominant", v.margin_nl_dominant},
        {"small_signal", v.small_signal},
        {"weak_thermal", v.weak_thermal},
        {"weak_dephasing", v.weak_dephasing},
        {"on_operating_point", v.on_operating_point},
        {"nonlinearity_dominant", v.nonlinearity_dominant},
    };
}

std::vector<double> row_values(const sweep::SweepRow& row) {
    const auto& in = row.inputs;
    const auto& r = row.report;
    const auto& v = r.validity;
    return {in.pulse.tau_s,
            in.pulse.area_m2,
            in.pulse.power_w,
            in.medium.n2_m2_per_w,
            in.pulse.wavelength_m,
            in.noise.eta,
            in.noise.sigma,
            in.noise.thermal_nt,
            row.derived.photons,
            row.derived.chi,
            row.derived.wavenumber,
            r.delta_x,
            r.delta_x_linear,
            r.improvement,
            v.margin_small_signal,
            v.margin_thermal,
            v.margin_dephasing,
            v.margin_operating_point,
            v.margin_nl_dominant};
}

json row_json(const sweep::SweepRow& row) {
    json out;
    const auto values = row_values(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[std::string(csv_columns[i])] = values[i];
    }
    return out;
}

// Writes the payload to --output (or `out`). CSV files get a sidecar manifest.
void emit(const GlobalFlags& g, std::ostream& out, const std::string& payload,
          const json* sidecar_manifest) {
    if (g.output.empty()) {
        out << payload;
        out.flush();
        return;
    }
    std::ofstream file(g.output, std::ios::binary);
    if (!file) {
        throw ValidationError("output", "cannot open '" + g.output + "' for writing");
    }
    file << payload;
    if (sidecar_manifest != nullptr) {
        std::ofstream side(g.output + ".manifest.json", std::ios::binary);
        side << sidecar_manifest->dump(2) << '\n';
    }
}

std::string resolve_format(const GlobalFlags& g, std::string_view fallback,
                           std::initializer_list<std::string_view> allowed) {
    const std::string fmt = g.format.empty() ? std::string(fallback) : g.format;
    for (auto a : allowed) {
        if (a == fmt) {
            return fmt;
        }
    }
    throw ValidationError("format", "unsupported format '" + fmt + "' for this command");
}

analytic::Thresholds thresholds(const GlobalFlags& g) {
    if (!(g.threshold > 0.0) || !std::isfinite(g.threshold)) {
        throw ValidationError("threshold", "must be finite and positive");
    }
    return analytic::Thresholds::uniform(g.threshold);
}

int cmd_estimate(const std::vector<std::string>& args, const GlobalFlags& g,
                 const PhysicalFlags& f, std::ostream& out) {
    const auto params = resolve(f);
    const auto row = sweep::evaluate(params, thresholds(g));
    const auto fmt = resolve_format(g, "json", {"json", "csv"});
    const auto m = manifest(args, parameters_json(params), std::nullopt);
    if (fmt == "csv") {
        emit(g, out, csv_header() + csv_row(row), &m);
        return exit_ok;
    }
    const auto& r = row.report;
    json doc{
        {"n_photons", row.derived.photons},
        {"chi", row.derived.chi},
        {"k", row.derived.wavenumber},
        {"delta_x_m", r.delta_x},
        {"delta_x_linear_m", r.delta_x_linear},
        {"improvement", r.improvement},
        {"var_M", r.var_M},
        {"dMdx", r.dMdx},
        {"validity", validity_json(r.validity)},
        {"manifest", m},
    };
    emit(g, out, doc.dump(2) + "\n", nullptr);
    return exit_ok;
}

int cmd_sweep(const std::vector<std::string>& args, const GlobalFlags& g, const PhysicalFlags& f,
              const std::vector<std::string>& grid_text, bool hold_photons,
              std::size_t max_rows, std::ostream& out) {
    const auto base = resolve(f);
    std::vector<sweep::GridSpec> grids;
    for (const auto& t : grid_text) {
        grids.push_back(sweep::GridSpec::parse(t));
    }
    sweep::SweepOptions opts;
    opts.row_cap = max_rows;
    opts.hold_photons = hold_photons;
    opts.thresholds = thresholds(g);
    const auto rows = sweep::run_sweep(base, grids, opts);

    json params = parameters_json(base);
    params["grids"] = grid_text;
    params["hold_photons"] = hold_photons;
    const auto m = manifest(args, std::move(params), std::nullopt);

    const auto fmt = resolve_format(g, "csv", {"csv", "json"});
    if (fmt == "csv") {
        std::string payload = csv_header();
        for (const auto& row : rows) {
            payload += csv_row(row);
        }
        emit(g, out, payload, &m);
        return exit_ok;
    }
    json doc;
    doc["rows"] = json::array();
    for (const auto& row : rows) {
        doc["rows"].push_back(row_json(row));
    }
    doc["manifest"] = m;
    emit(g, out, doc.dump(2) + "\n", nullptr);
    return exit_ok;
}

std::vector<verify::Case> parse_cases(const std::string& text) {
    std::vector<verify::Case> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        bool found = false;
        for (auto c : verify::all_cases) {
            if (verify::case_name(c) == item) {
                out.push_back(c);
                found = true;
            }
        }
        if (!found) {
            throw ValidationError("cases", "unknown case '" + item +
                                               "' (expected mean,a3,m2,gauss,noise)");
        }
    }
    if (out.empty()) {
        throw ValidationError("cases", "no cases selected");
    }
    return out;
}

int cmd_verify(const std::vector<std::string>& args, const GlobalFlags& g,
               verify::Config cfg, const std::string& cases, std::ostream& out) {
    cfg.seed = g.seed;
    if (!cases.empty()) {
        cfg.cases = parse_cases(cases);
    }
    const auto fmt = resolve_format(g, "text", {"text", "json"});
    const auto report = verify::run(cfg);

    json cfg_json{
        {"max_photons", cfg.max_photons},
        {"dim_margin", cfg.dim_margin},
        {"tolerance", cfg.tolerance},
        {"mc_samples", cfg.mc_samples},
        {"photon_grid", verify::photon_grid(cfg.max_photons)},
    };
    const auto m = manifest(args, cfg_json, cfg.seed);

    if (fmt == "json") {
        json doc;
        doc["cases"] = json::array();
        for (const auto& c : report.cases) {
            doc["cases"].push_back(json{{"case", verify::case_name(c.which)},
                                        {"checks", c.checks},
                                        {"metric", c.metric},
                                        {"max_error", c.max_error},
                                        {"threshold", c.threshold},
                                        {"passed", c.passed}});
        }
        doc["passed"] = report.passed();
        doc["manifest"] = m;
        emit(g, out, doc.dump(2) + "\n", nullptr);
    } else {
        std::ostringstream os;
        os << "# kerrmi verify max_photons=" << cfg.max_photons
           << " dim_margin=" << format_double(cfg.dim_margin)
           << " tolerance=" << format_double(cfg.tolerance) << " seed=" << cfg.seed << '\n';
        for (const auto& c : report.cases) {
            os << verify::case_name(c.which) << " checks=" << c.checks << ' ' << c.metric
               << "_max=" << format_double(c.max_error)
               << " threshold=" << format_double(c.threshold) << ' '
               << (c.passed ? "PASS" : "FAIL") << '\n';
        }
        os << "result " << (report.passed() ? "PASS" : "FAIL") << '\n';
        emit(g, out, os.str(), &m);
    }
    return report.passed() ? exit_ok : exit_verify_failed;
}

int cmd_regimes(const std::vector<std::string>& args, const GlobalFlags& g, std::ostream& out) {
    resolve_format(g, "json", {"json"});
    const auto th = thresholds(g);
    json doc;
    doc["presets"] = json::array();
    std::vector<double> scaling;
    for (const auto& preset : presets()) {
        const auto rep = sweep::regime_report(preset.name, 1, th);
        const auto& in = rep.row.inputs;
        const auto& d = rep.row.derived;
        const double scale = analytic::conjectured_scaling(in.pulse.tau_s, in.pulse.area_m2,
                                                           in.pulse.wavelength_m, d.photons);
        scaling.push_back(scale);
        json inputs = parameters_json(in);
        inputs["n2_cm2_per_w"] = in.medium.n2_m2_per_w * 1e4;
        doc["presets"].push_back(json{
            {"name", rep.name},
            {"inputs", inputs},
            {"n_photons", d.photons},
            {"chi", d.chi},
            {"k", d.wavenumber},
            {"delta_x_m", rep.row.report.delta_x},
            {"delta_x_linear_m", rep.row.report.delta_x_linear},
            {"improvement", rep.row.report.improvement},
            {"operating_point", {{"m", rep.m}, {"arm_length_m", rep.arm_length_m}}},
            {"signal_window", {{"x_min_m", rep.x_min_m}, {"x_max_m", rep.x_max_m}}},
            {"imperfection_bounds", {{"sigma_max", rep.sigma_max}, {"nt_max", rep.nt_max}}},
            {"conjectured_scaling", scale},
            {"impractical", rep.impractical},
            {"note", rep.note},
            {"validity", validity_json(rep.row.report.validity)},
        });
    }
    // giant-eit relative to natural
    doc["conjectured_scaling_ratio"] = scaling[1] / scaling[0];
    doc["manifest"] = manifest(args, json::object(), std::nullopt);
    emit(g, out, doc.dump(2) + "\n", nullptr);
    return exit_ok;
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string csv_header() {
    std::string out;
    for (std::size_t i = 0; i < std::size(csv_columns); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += csv_columns[i];
    }
    out += '\n';
    return out;
}

std::string csv_row(const sweep::SweepRow& row) {
    std::string out;
    const auto values = row_values(row);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += format_double(values[i]);
    }
    out += '\n';
    return out;
}

double parse_n2(std::string_view text) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) {
        throw ValidationError("n2", "cannot parse '" + std::string(text) + "'");
    }
    const std::string_view unit(ptr, static_cast<std::size_t>(last - ptr));
    if (unit.empty() || unit == "cm2/W") {
        return n2_from_cm2_per_w(value);
    }
    if (unit == "m2/W") {
        return value;
    }
    throw ValidationError("n2", "unknown unit '" + std::string(unit) + "' (use cm2/W or m2/W)");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kerr-medium Michelson interferometer: sensitivity, sweeps and oracle checks",
                 "kerrmi"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--output", g.output, "Write results to this file instead of stdout");
    app.add_option("--format", g.format, "json | csv (text | json for verify)");
    app.add_option("--threshold", g.threshold, "Margin ratio below which a '<<' condition holds");
    g.seed_opt = app.add_option("--seed", g.seed, "Seed for Monte Carlo streams");
    app.set_version_flag("--version", KERRMI_VERSION);

    PhysicalFlags est_flags;
    auto* estimate = app.add_subcommand("estimate", "Sensitivity report for one configuration");
    add_physical_flags(*estimate, est_flags);

    PhysicalFlags sweep_flags;
    std::vector<std::string> grid_text;
    bool hold_photons = false;
    std::size_t max_rows = 1'000'000;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sensitivity over a parameter grid (CSV)");
    add_physical_flags(*sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--grid", grid_text, "name=lo:hi:points[:linear|log], SI units")
        ->take_all();
    sweep_cmd->add_flag("--hold-photons", hold_photons,
                        "Co-vary power to keep the base photon number");
    sweep_cmd->add_option("--max-rows", max_rows, "Row cap");

    verify::Config vcfg;
    std::string cases;
    auto* verify_cmd = app.add_subcommand("verify", "Fock-space oracle against closed forms");
    verify_cmd->add_option("--max-photons", vcfg.max_photons, "Largest photon number (<= 30)");
    verify_cmd->add_option("--dim-margin", vcfg.dim_margin,
                           "Additive truncation margin: D = mu + 10 sqrt(mu) + margin");
    verify_cmd->add_option("--tolerance", vcfg.tolerance, "Maximum scaled error");
    verify_cmd->add_option("--cases", cases, "Comma list of mean,a3,m2,gauss,noise");
    verify_cmd->add_option("--samples", vcfg.mc_samples, "Monte Carlo samples per check");

    auto* regimes = app.add_subcommand("regimes", "Built-in presets and their operating points");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << KERRMI_VERSION << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "kerrmi: error: " << msg << '\n';
        return exit_input_error;
    }

    try {
        if (estimate->parsed()) {
            return cmd_estimate(args, g, est_flags, out);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(args, g, sweep_flags, grid_text, hold_photons, max_rows, out);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(args, g, vcfg, cases, out);
        }
        if (regimes->parsed()) {
            return cmd_regimes(args, g, out);
        }
    } catch (const ValidationError& e) {
        err << "kerrmi: error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const fock::TruncationError& e) {
        err << "kerrmi: error: " << e.what() << '\n';
        return exit_input_error;
    }
    err << "kerrmi: error: no subcommand\n";
    return exit_input_error;
}

}  // namespace kerrmi::cli
