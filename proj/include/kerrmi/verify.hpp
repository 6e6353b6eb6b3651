#pragma once

// Oracle-versus-closed-form verification suite. Every case builds states in
// the truncated Fock basis, evaluates moments by direct contraction and
// compares against the corresponding analytic expression.
//
// Errors are |oracle - analytic| / max(|analytic|, 1): relative for values of
// at least one photon count, absolute below that. A check passes when its
// error is strictly below the tolerance, so a zero tolerance always fails.

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

namespace kerrmi::verify {

enum class Case { mean, a3, m2, gauss, noise };

inline constexpr Case all_cases[] = {Case::mean, Case::a3, Case::m2, Case::gauss, Case::noise};

std::string_view case_name(Case c);

struct Config {
    int max_photons = 25;  // capped at 30
    double dim_margin = 20.0;
    double tolerance = 1e-9;
    std::uint64_t seed = 42;
    std::size_t mc_samples = 100'000;
    double mc_sigma_limit = 3.0;  // Monte Carlo agreement in standard errors
    std::vector<Case> cases{std::begin(all_cases), std::end(all_cases)};

    void validate() const;
};

struct CaseResult {
    Case which;
    std::size_t checks = 0;
    double max_error = 0.0;
    double threshold = 0.0;
    std::string metric;  // "rel_error" or "z_score"
    bool passed = true;
};

struct Report {
    std::vector<CaseResult> cases;
    bool passed() const;
};

/// Photon numbers exercised: perfect squares in [1, max_photons], or {0}
/// when that range is empty.
std::vector<int> photon_grid(int max_photons);

inline constexpr double chi_grid[] = {0.0, 0.01, 0.1};

Report run(const Config& config);

}  // namespace kerrmi::verify
