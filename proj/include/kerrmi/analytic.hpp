#pragma once

// Closed-form signal, noise and sensitivity of the Kerr Michelson
// interferometer driven by a coherent pulse of mean photon number N.
//
// Conventions: phi_j = k l_j are the arm phases, z_j = phi_j chi / 2, and the
// readout is the photocount difference M = i(a2^dag a1 - a1^dag a2).

#include "kerrmi/core.hpp"

namespace kerrmi::analytic {

enum class MeanVariant { exact, approx_gauss, linearized };

/// Small-sigma expansion (default) or the form before expanding e^{-2 sigma^2}.
enum class VarianceForm { small_sigma, exact_phase_average };

struct MeanModel {
    MeanVariant variant;
    double value;
};

/// Exact coherent-state mean of M for a fixed relative phase offset
/// `phase_offset`. No small-parameter assumption.
double mean_M_exact(double photons, double chi, double phi1, double phi2,
                    double phase_offset, double eta);

/// The same exact mean written in terms of the signal phase k x and the
/// operating-point detuning z0 - m pi. Mathematically identical to the form
/// above, but usable when x is far below the resolution of l0 in double
/// precision (phi_j ~ 1e9 rad in the built-in regimes).
double mean_M_exact_detuned(double photons, double chi, double kx, double detuning,
                            double phase_offset, double eta);

/// Mean near the operating point z0 = m pi, averaged over a Gaussian phase
/// of standard deviation sigma:
/// eta N exp(-N chi^2 k^2 x^2 / 8) exp(-sigma^2 / 2) sin[k x (1 + chi N / 2)].
double mean_M_approx(double photons, double chi, double wavenumber, double signal_x,
                     double sigma, double eta);

/// Small-signal form eta N k x (1 + chi N / 2).
double mean_M_linearized(double photons, double chi, double wavenumber, double signal_x,
                         double eta);

MeanModel mean_M(MeanVariant variant, const Parameters& params);

/// Background variance of M at x = 0.
double var_M(double photons, double chi, double eta, double sigma, double thermal_nt,
             VarianceForm form = VarianceForm::small_sigma);

/// Noiseless <M0^2> at x = 0 before phase randomization.
double mean_M0_squared(double photons, double phase_offset);

double delta_x(double photons, double chi, double wavenumber, double eta, double sigma,
               double thermal_nt);

/// Linear interferometer in vacuum, phase noise neglected.
double delta_x_linear(double photons, double wavenumber, double eta, double thermal_nt);

double improvement_ratio(double photons, double chi, double eta, double sigma,
                         double thermal_nt);

/// tau A lambda^2 / N^2 with unit proportionality constant. Only ratios of
/// this value are meaningful.
double conjectured_scaling(double tau_s, double area_m2, double wavelength_m, double photons);

struct Thresholds {
    double small_signal = 1e-2;
    double thermal = 1e-2;
    double dephasing = 1e-2;
    double operating_point = 1e-2;
    double nl_dominant = 1e-2;

    static Thresholds uniform(double value) { return {value, value, value, value, value}; }
};

struct ValidityFlags {
    // Margin ratios; each "<<" condition holds when its ratio is below threshold.
    double margin_small_signal = 0.0;     // chi N k |x|
    double margin_thermal = 0.0;          // N_t / N
    double margin_dephasing = 0.0;        // sigma
    double margin_operating_point = 0.0;  // |z0 - m pi| / pi
    double margin_nl_dominant = 0.0;      // (eta N sigma^2 + N_t) / (chi N)^2

    bool small_signal = true;
    bool weak_thermal = true;
    bool weak_dephasing = true;
    bool on_operating_point = true;
    bool nonlinearity_dominant = true;

    bool all() const {
        return small_signal && weak_thermal && weak_dephasing && on_operating_point &&
               nonlinearity_dominant;
    }
};

ValidityFlags validity(const KerrDerived& derived, const GeometrySpec& geometry,
                       const NoiseSpec& noise, const Thresholds& thresholds = {});

struct SensitivityReport {
    double delta_x = 0.0;
    double delta_x_linear = 0.0;
    double improvement = 0.0;
    double var_M = 0.0;
    double dMdx = 0.0;
    ValidityFlags validity;
};

SensitivityReport sensitivity(const KerrDerived& derived, const GeometrySpec& geometry,
                              const NoiseSpec& noise, const Thresholds& thresholds = {});

}  // namespace kerrmi::analytic
