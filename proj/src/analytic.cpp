#include "kerrmi/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace kerrmi::analytic {

double mean_M_exact(double photons, double chi, double phi1, double phi2,
                    double phase_offset, double eta) {
    const double z1 = phi1 * chi / 2.0;
    const double z2 = phi2 * chi / 2.0;
    const double half_n = photons / 2.0;
    const double envelope =
        std::exp(half_n * (std::cos(2.0 * z1) + std::cos(2.0 * z2) - 2.0));
    const double argument = phase_offset + (phi2 - phi1) + (z2 - z1) +
                            half_n * (std::sin(2.0 * z2) - std::sin(2.0 * z1));
    return eta * photons * envelope * std::sin(argument);
}

double mean_M_exact_detuned(double photons, double chi, double kx, double detuning,
                            double phase_offset, double eta) {
    // 2 z_j = 2 (z0 -+ chi k x / 4), reduced modulo 2 pi to 2 detuning -+ chi k x / 2.
    const double half_split = chi * kx / 2.0;
    const double two_z1 = 2.0 * detuning - half_split;
    const double two_z2 = 2.0 * detuning + half_split;
    const double half_n = photons / 2.0;
    const double envelope = std::exp(half_n * (std::cos(two_z1) + std::cos(two_z2) - 2.0));
    const double argument = phase_offset + kx + half_split +
                            half_n * (std::sin(two_z2) - std::sin(two_z1));
    return eta * photons * envelope * std::sin(argument);
}

double mean_M_approx(double photons, double chi, double wavenumber, double signal_x,
                     double sigma, double eta) {
    const double kx = wavenumber * signal_x;
    return eta * photons * std::exp(-photons * chi * chi * kx * kx / 8.0) *
           std::exp(-sigma * sigma / 2.0) * std::sin(kx * (1.0 + chi * photons / 2.0));
}

double mean_M_linearized(double photons, double chi, double wavenumber, double signal_x,
                         double eta) {
    return eta * photons * wavenumber * signal_x * (1.0 + chi * photons / 2.0);
}

MeanModel mean_M(MeanVariant variant, const Parameters& params) {
    params.validate();
    const auto d = derive(params.pulse, params.medium);
    const auto& noise = params.noise;
    const double x = params.geometry.signal_x_m;
    switch (variant) {
        case MeanVariant::exact: {
            // Phase offset fixed at its mean (zero); sigma enters via the Gaussian factor.
            const auto ph = kerr_phases(d, params.geometry);
            const double value = mean_M_exact_detuned(d.photons, d.chi, d.wavenumber * x,
                                                      ph.detuning, 0.0, noise.eta) *
                                 std::exp(-noise.sigma * noise.sigma / 2.0);
            return {variant, value};
        }
        case MeanVariant::approx_gauss:
            return {variant,
                    mean_M_approx(d.photons, d.chi, d.wavenumber, x, noise.sigma, noise.eta)};
        case MeanVariant::linearized:
            return {variant, mean_M_linearized(d.photons, d.chi, d.wavenumber, x, noise.eta)};
    }
    return {variant, std::numeric_limits<double>::quiet_NaN()};
}

double var_M(double photons, double /*chi*/, double eta, double sigma, double thermal_nt,
             VarianceForm form) {
    const double shot = eta * photons;
    const double thermal = eta * photons * thermal_nt;
    double dephasing = 0.0;
    if (form == VarianceForm::small_sigma) {
        dephasing = eta * eta * photons * photons * sigma * sigma;
    } else {
        // N^2/2 (1 - e^{-2 sigma^2}); expm1 keeps precision for small sigma.
        dephasing = -eta * eta * photons * photons / 2.0 * std::expm1(-2.0 * sigma * sigma);
    }
    return shot + dephasing + thermal;
}

double mean_M0_squared(double photons, double phase_offset) {
    const double half_sq = photons * photons / 2.0;
    return half_sq + photons - half_sq * std::cos(2.0 * phase_offset);
}

double delta_x(double photons, double chi, double wavenumber, double eta, double sigma,
               double thermal_nt) {
    const double numerator = 1.0 + eta * photons * sigma * sigma + thermal_nt;
    const double denominator = eta * wavenumber * wavenumber * photons;
    return std::sqrt(numerator / denominator) / (1.0 + chi * photons / 2.0);
}

double delta_x_linear(double photons, double wavenumber, double eta, double thermal_nt) {
    return std::sqrt((1.0 + thermal_nt) / (eta * wavenumber * wavenumber * photons));
}

double improvement_ratio(double photons, double chi, double eta, double sigma,
                         double thermal_nt) {
    // The wavenumber cancels in the ratio; evaluate at k = 1.
    return delta_x(photons, chi, 1.0, eta, sigma, thermal_nt) /
           delta_x_linear(photons, 1.0, eta, thermal_nt);
}

double conjectured_scaling(double tau_s, double area_m2, double wavelength_m, double photons) {
    return tau_s * area_m2 * wavelength_m * wavelength_m / (photons * photons);
}

namespace {

double safe_ratio(double numerator, double denominator) {
    if (numerator == 0.0) {
        return 0.0;
    }
    if (denominator == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return numerator / denominator;
}

}  // namespace

ValidityFlags validity(const KerrDerived& derived, const GeometrySpec& geometry,
                       const NoiseSpec& noise, const Thresholds& thresholds) {
    const double n = derived.photons;
    const double chi_n = derived.chi * n;
    const auto phases = kerr_phases(derived, geometry);

    ValidityFlags f;
    f.margin_small_signal = chi_n * derived.wavenumber * std::abs(geometry.signal_x_m);
    f.margin_thermal = safe_ratio(noise.thermal_nt, n);
    f.margin_dephasing = noise.sigma;
    f.margin_operating_point = std::abs(phases.detuning) / std::numbers::pi;
    f.margin_nl_dominant =
        safe_ratio(noise.eta * n * noise.sigma * noise.sigma + noise.thermal_nt, chi_n * chi_n);

    f.small_signal = f.margin_small_signal < thresholds.small_signal;
    f.weak_thermal = f.margin_thermal < thresholds.thermal;
    f.weak_dephasing = f.margin_dephasing < thresholds.dephasing;
    f.on_operating_point = f.margin_operating_point < thresholds.operating_point;
    f.nonlinearity_dominant = f.margin_nl_dominant < thresholds.nl_dominant;
    return f;
}

SensitivityReport sensitivity(const KerrDerived& derived, const GeometrySpec& geometry,
                              const NoiseSpec& noise, const Thresholds& thresholds) {
    const double n = derived.photons;
    SensitivityReport r;
    r.delta_x = delta_x(n, derived.chi, derived.wavenumber, noise.eta, noise.sigma,
                        noise.thermal_nt);
    r.delta_x_linear = delta_x_linear(n, derived.wavenumber, noise.eta, noise.thermal_nt);
    r.improvement = improvement_ratio(n, derived.chi, noise.eta, noise.sigma, noise.thermal_nt);
    r.var_M = var_M(n, derived.chi, noise.eta, noise.sigma, noise.thermal_nt);
    r.dMdx = noise.eta * n * derived.wavenumber * (1.0 + derived.chi * n / 2.0);
    r.validity = validity(derived, geometry, noise, thresholds);
    return r;
}

}  // namespace kerrmi::analytic
