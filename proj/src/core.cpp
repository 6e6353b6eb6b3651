#include "kerrmi/core.hpp"

#include <cmath>
#include <numbers>

namespace kerrmi {

namespace {

void require_positive(double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ValidationError(field, "must be finite and strictly positive");
    }
}

void require_non_negative(double value, const char* field) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ValidationError(field, "must be finite and non-negative");
    }
}

}  // namespace

void PulseSpec::validate() const {
    require_positive(wavelength_m, "wavelength");
    require_positive(tau_s, "tau");
    require_positive(area_m2, "area");
    require_positive(power_w, "power");
    require_positive(angular_frequency(), "wavelength");
}

double PulseSpec::angular_frequency() const {
    return 2.0 * std::numbers::pi * constants::speed_of_light / wavelength_m;
}

double PulseSpec::photon_energy() const { return constants::hbar * angular_frequency(); }

void MediumSpec::validate() const {
    require_positive(n0, "n0");
    require_non_negative(n2_m2_per_w, "n2");
}

void GeometrySpec::validate() const {
    require_positive(arm_length_m, "arm_length");
    if (!std::isfinite(signal_x_m)) {
        throw ValidationError("signal", "must be finite");
    }
    if (!(arm1() > 0.0) || !(arm2() > 0.0)) {
        throw ValidationError("signal", "|x|/2 must be shorter than the arm length");
    }
}

void NoiseSpec::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw ValidationError("eta", "must lie in (0, 1]");
    }
    require_non_negative(sigma, "sigma");
    require_non_negative(thermal_nt, "nt");
}

void Parameters::validate() const {
    pulse.validate();
    medium.validate();
    geometry.validate();
    noise.validate();
}

KerrDerived derive(const PulseSpec& pulse, const MediumSpec& medium) {
    pulse.validate();
    medium.validate();
    const double omega = pulse.angular_frequency();
    const double photon_energy = constants::hbar * omega;
    KerrDerived out;
    out.photons = pulse.power_w * pulse.tau_s / photon_energy;
    out.intensity = pulse.power_w / pulse.area_m2;
    out.chi = (medium.n2_m2_per_w / medium.n0) * photon_energy / (pulse.area_m2 * pulse.tau_s);
    out.wavenumber = medium.n0 * omega / constants::speed_of_light;
    return out;
}

double refractive_index(const MediumSpec& medium, const KerrDerived& derived) {
    medium.validate();
    return medium.n0 * (1.0 + derived.chi * derived.photons);
}

KerrPhases kerr_phases(const KerrDerived& derived, const GeometrySpec& geometry) {
    KerrPhases out;
    out.phi1 = derived.wavenumber * geometry.arm1();
    out.phi2 = derived.wavenumber * geometry.arm2();
    out.z1 = out.phi1 * derived.chi / 2.0;
    out.z2 = out.phi2 * derived.chi / 2.0;
    out.z0 = derived.wavenumber * geometry.arm_length_m * derived.chi / 2.0;
    // nearbyint under the default rounding mode breaks ties toward even m.
    const double m = std::nearbyint(out.z0 / std::numbers::pi);
    out.nearest_m = static_cast<std::int64_t>(m);
    out.detuning = out.z0 - m * std::numbers::pi;
    return out;
}

double operating_arm_length(const KerrDerived& derived, std::int64_t m) {
    if (m < 1) {
        throw ValidationError("m", "operating point order must be >= 1");
    }
    if (!(derived.chi > 0.0) || !(derived.wavenumber > 0.0)) {
        throw ValidationError("chi", "operating point requires a Kerr medium (chi > 0)");
    }
    return 2.0 * std::numbers::pi * static_cast<double>(m) / (derived.wavenumber * derived.chi);
}

double power_for_photons(const PulseSpec& pulse, double photons) {
    return photons * pulse.photon_energy() / pulse.tau_s;
}

Parameters RegimePreset::parameters(double signal_x_m) const {
    return Parameters{pulse, medium, GeometrySpec{arm_length_m, signal_x_m}, noise};
}

namespace {

RegimePreset make_preset(std::string_view name, PulseSpec pulse, MediumSpec medium) {
    const double arm = operating_arm_length(derive(pulse, medium), 1);
    return RegimePreset{name, pulse, medium, arm, NoiseSpec{1.0, 0.0, 0.0}};
}

}  // namespace

const std::array<RegimePreset, 2>& presets() {
    static const std::array<RegimePreset, 2> table{
        make_preset("natural",
                    PulseSpec{500e-9, 1e-12, 1e-9, 1e15},
                    MediumSpec{1.0, n2_from_cm2_per_w(1e-17)}),
        make_preset("giant-eit",
                    PulseSpec{500e-9, 100e-12, 1e-6, 1e6},
                    MediumSpec{1.0, n2_from_cm2_per_w(1e-2)}),
    };
    return table;
}

const RegimePreset& preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) {
            return p;
        }
    }
    throw ValidationError("regime", "unknown preset '" + std::string(name) +
                                        "' (expected natural or giant-eit)");
}

}  // namespace kerrmi
