#pragma once

// Brute-force two-mode simulator in a truncated Fock basis. The state lives
// in the internal arm modes a1, a2 right after the input beam splitter, so a
// coherent pulse |alpha> enters as |alpha/sqrt2>_1 |alpha/sqrt2>_2.
//
// Kernels come in pairs: the default entry points are OpenMP-parallel, the
// *_serial variants are straight loops kept as the reference in tests and
// benchmarks. Parallel reductions combine per-row partials in row order, so
// results do not depend on the thread count.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "kerrmi/core.hpp"

namespace kerrmi::fock {

using complex = std::complex<double>;

inline constexpr double default_truncation_budget = 1e-10;

/// Raised when a basis of the requested size would discard more probability
/// than the truncation budget allows.
class TruncationError : public std::runtime_error {
public:
    TruncationError(double captured, double budget);

    double captured_norm() const noexcept { return captured_; }
    double budget() const noexcept { return budget_; }

private:
    double captured_;
    double budget_;
};

/// ceil(mu + 10 sqrt(mu) + margin), never below 1.
std::size_t default_dimension(double mean_photons, double margin = 20.0);

struct CoherentVector {
    std::vector<complex> amplitudes;
    double tail_mass = 0.0;  // probability beyond the truncation

    double captured_norm() const;
};

/// Fock amplitudes e^{-|beta|^2/2} beta^n / sqrt(n!) for n < dim, via a
/// log-domain recurrence. Throws TruncationError if the tail exceeds `budget`.
CoherentVector coherent_vector(complex beta, std::size_t dim,
                               double budget = default_truncation_budget);

class TwoModeState {
public:
    TwoModeState(std::size_t dim1, std::size_t dim2);
    TwoModeState(std::size_t dim1, std::size_t dim2, std::vector<complex> coeffs,
                 double truncation_loss = 0.0);

    std::size_t dim1() const { return dim1_; }
    std::size_t dim2() const { return dim2_; }

    complex operator()(std::size_t n, std::size_t m) const { return coeffs_[n * dim2_ + m]; }
    std::span<const complex> coeffs() const { return coeffs_; }
    std::span<const complex> row(std::size_t n) const {
        return std::span<const complex>(coeffs_).subspan(n * dim2_, dim2_);
    }

    /// Probability discarded by the truncation when the state was built.
    double truncation_loss() const { return truncation_loss_; }
    double norm_squared() const;

private:
    friend TwoModeState apply_kerr(const TwoModeState&, double, double, double);
    friend TwoModeState apply_kerr_serial(const TwoModeState&, double, double, double);
    friend TwoModeState apply_phase_offset(const TwoModeState&, double);

    std::size_t dim1_;
    std::size_t dim2_;
    std::vector<complex> coeffs_;
    double truncation_loss_ = 0.0;
};

/// |alpha/sqrt2>|alpha/sqrt2>; dim = 0 picks default_dimension(|alpha|^2 / 2).
TwoModeState product_input(complex alpha, std::size_t dim = 0,
                           double budget = default_truncation_budget);

/// U1 U2 with U_j = exp(i phi_j (N_j + chi N_j^2 / 2)).
TwoModeState apply_kerr(const TwoModeState& state, double phi1, double phi2, double chi);
TwoModeState apply_kerr_serial(const TwoModeState& state, double phi1, double phi2, double chi);

/// exp(i phi N2): turns a1^dag a2 into e^{i phi} a1^dag a2, the relative phase
/// offset of the readout.
TwoModeState apply_phase_offset(const TwoModeState& state, double phi);

struct MomentSet {
    double mean_N1 = 0.0;
    double mean_N2 = 0.0;
    complex cross_C{};          // <a1^dag a2>
    complex pair_P{};           // <a1^dag^2 a2^2>
    double number_part = 0.0;   // <2 N1 N2 + N1 + N2>
    double mean_M = 0.0;        // 2 Im C
    double mean_M2 = 0.0;       // number_part - 2 Re P
    double trunc_loss = 0.0;

    double variance() const { return mean_M2 - mean_M * mean_M; }
};

MomentSet moments(const TwoModeState& state);
MomentSet moments_serial(const TwoModeState& state);

/// Applies detector efficiency, Gaussian phase randomization and thermal
/// photons at the moment level. Throws ValidationError for an invalid spec.
MomentSet noisy_moments(const MomentSet& noiseless, const NoiseSpec& noise);

struct IdentityCheck {
    complex direct;
    complex closed_form;
    double residual;
};

/// <beta| e^{i 2 z N} a |beta> by contraction in a dim-sized basis against
/// beta exp[|beta|^2 (e^{i 2z} - 1)].
IdentityCheck verify_A3(complex beta, double z, std::size_t dim,
                        double budget = default_truncation_budget);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

/// Sample mean of fn(phi) with phi ~ N(0, sigma^2). Samples are drawn in
/// fixed-size blocks, each from its own stream derived from (seed, block), so
/// the estimate is reproducible and independent of thread scheduling.
MonteCarloEstimate monte_carlo_phase(const std::function<double(double)>& fn, double sigma,
                                     std::size_t samples, std::uint64_t seed);
MonteCarloEstimate monte_carlo_phase_serial(const std::function<double(double)>& fn,
                                            double sigma, std::size_t samples,
                                            std::uint64_t seed);

/// splitmix64 finalizer, used to derive independent per-task seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace kerrmi::fock
