#pragma once

// Exhaustive parameter grids over the closed-form sensitivity, plus the
// operating-point report for the two built-in regimes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kerrmi/analytic.hpp"
#include "kerrmi/core.hpp"

namespace kerrmi::sweep {

enum class Axis { tau, area, power, n2, wavelength, eta, sigma, nt, arm_length, signal_x };
enum class Spacing { linear, log };

std::string_view axis_name(Axis axis);
std::optional<Axis> parse_axis(std::string_view name);

/// One grid axis. Values are SI (n2 in m^2/W). Endpoints are reproduced
/// exactly; interior points are lo + i step or lo (hi/lo)^(i/(n-1)).
struct GridSpec {
    Axis axis = Axis::tau;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t points = 2;
    Spacing spacing = Spacing::linear;

    void validate() const;
    std::vector<double> values() const;

    /// Parses "name=lo:hi:points[:linear|log]".
    static GridSpec parse(std::string_view text);
};

struct SweepRow {
    Parameters inputs;
    KerrDerived derived;
    analytic::SensitivityReport report;
};

/// Evaluates a single parameter set (validates it first).
SweepRow evaluate(const Parameters& params, const analytic::Thresholds& thresholds = {});

struct SweepOptions {
    std::size_t row_cap = 1'000'000;
    /// Co-vary the power so every row keeps the base photon number.
    bool hold_photons = false;
    analytic::Thresholds thresholds;
};

inline constexpr std::size_t max_axes = 3;

/// Cartesian product of the grids in declared order; row index is
/// lexicographic in the grid indices with the first axis slowest. Throws
/// ValidationError for invalid grids, cap breaches or invalid rows.
std::vector<SweepRow> run_sweep(const Parameters& base, const std::vector<GridSpec>& grids,
                                const SweepOptions& options = {});
std::vector<SweepRow> run_sweep_serial(const Parameters& base,
                                       const std::vector<GridSpec>& grids,
                                       const SweepOptions& options = {});

struct RegimeReport {
    std::string name;
    SweepRow row;               // preset at its operating point, x = 0
    std::int64_t m = 1;
    double arm_length_m = 0.0;  // smallest l0 > 0 with z0 = m pi
    double x_min_m = 0.0;       // delta_x
    double x_max_m = 0.0;       // chi N k x = 1
    double sigma_max = 0.0;     // chi sqrt(N / eta)
    double nt_max = 0.0;        // (chi N)^2
    bool impractical = false;
    std::string note;
};

/// Arm lengths above this are flagged as impractical.
inline constexpr double practical_arm_limit_m = 1e4;

RegimeReport regime_report(std::string_view preset_name, std::int64_t m = 1,
                           const analytic::Thresholds& thresholds = {});

}  // namespace kerrmi::sweep
