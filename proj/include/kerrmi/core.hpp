#pragma once

// Domain types for the Kerr-medium Michelson interferometer: pulse, medium,
// geometry and noise specifications, the quantities derived from them, and
// the two built-in parameter regimes. Everything here is SI.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace kerrmi {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double speed_of_light = 2.99792458e8;  // m / s
}  // namespace constants

/// Raised when an input specification violates its invariants. The message
/// always starts with the offending field name.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Kerr coefficients are quoted in cm^2/W; convert to m^2/W.
constexpr double n2_from_cm2_per_w(double value) { return value * 1e-4; }

struct PulseSpec {
    double wavelength_m = 0.0;
    double tau_s = 0.0;
    double area_m2 = 0.0;
    double power_w = 0.0;

    void validate() const;
    double angular_frequency() const;  // 2 pi c / lambda
    double photon_energy() const;      // hbar omega
};

struct MediumSpec {
    double n0 = 1.0;
    double n2_m2_per_w = 0.0;

    void validate() const;
};

struct KerrDerived {
    double photons = 0.0;      // N = P tau / (hbar omega)
    double intensity = 0.0;    // I = P / A
    double chi = 0.0;          // (n2 / n0) hbar omega / (A tau)
    double wavenumber = 0.0;   // k = n0 omega / c
};

struct GeometrySpec {
    double arm_length_m = 0.0;
    double signal_x_m = 0.0;

    void validate() const;
    double arm1() const { return arm_length_m - 0.5 * signal_x_m; }
    double arm2() const { return arm_length_m + 0.5 * signal_x_m; }
};

struct KerrPhases {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;
    double z0 = 0.0;
    std::int64_t nearest_m = 0;
    double detuning = 0.0;  // z0 - m pi, |detuning| <= pi / 2
};

struct NoiseSpec {
    double eta = 1.0;
    double sigma = 0.0;
    double thermal_nt = 0.0;

    void validate() const;
};

/// Full resolved input to an interferometer evaluation.
struct Parameters {
    PulseSpec pulse;
    MediumSpec medium;
    GeometrySpec geometry;
    NoiseSpec noise;

    void validate() const;
};

struct RegimePreset {
    std::string_view name;
    PulseSpec pulse;
    MediumSpec medium;
    double arm_length_m;  // operating point z0 = pi (m = 1)
    NoiseSpec noise;

    Parameters parameters(double signal_x_m = 0.0) const;
};

KerrDerived derive(const PulseSpec& pulse, const MediumSpec& medium);

/// n = n0 (1 + chi N).
double refractive_index(const MediumSpec& medium, const KerrDerived& derived);

KerrPhases kerr_phases(const KerrDerived& derived, const GeometrySpec& geometry);

/// Smallest positive arm length putting z0 = m pi. Requires chi > 0 and m >= 1.
double operating_arm_length(const KerrDerived& derived, std::int64_t m = 1);

/// Power that delivers `photons` per pulse at the pulse's wavelength and duration.
double power_for_photons(const PulseSpec& pulse, double photons);

const std::array<RegimePreset, 2>& presets();

/// Throws ValidationError("regime", ...) for unknown names.
const RegimePreset& preset(std::string_view name);

}  // namespace kerrmi
