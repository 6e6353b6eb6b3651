#pragma once

// Command-line front end: estimate | sweep | verify | regimes.
//
// Exit codes: 0 success, 1 input error, 2 verification failure.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kerrmi/sweep.hpp"

namespace kerrmi::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 1;
inline constexpr int exit_verify_failed = 2;

/// Column order of sweep CSV output; a compatibility contract.
inline constexpr std::string_view csv_columns[] = {
    "tau_s",           "area_m2",          "power_w",        "n2_m2_per_w",
    "wavelength_m",    "eta",              "sigma",          "nt",
    "n_photons",       "chi",              "k_per_m",        "delta_x_m",
    "delta_x_linear_m", "improvement",     "margin_small_signal", "margin_thermal",
    "margin_dephasing", "margin_operating_point", "margin_nl_dominant",
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

std::string csv_header();
std::string csv_row(const sweep::SweepRow& row);

/// Parses an n2 value: a bare number is cm^2/W, or suffix "cm2/W" / "m2/W".
/// Returns m^2/W.
double parse_n2(std::string_view text);

/// args excludes the program name. Writes results to `out` (or --output) and
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kerrmi::cli
