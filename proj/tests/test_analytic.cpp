#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "kerrmi/analytic.hpp"
#include "kerrmi/core.hpp"

using namespace kerrmi;
using namespace kerrmi::analytic;

namespace {

bool within_factor(double value, double order, double factor = 5.0) {
    return value > 0.0 && std::abs(std::log10(value / order)) <= std::log10(factor);
}

// Gauss-Hermite rule for the weight e^{-t^2} by Golub-Welsch: nodes are the
// eigenvalues of the Jacobi matrix, weights sqrt(pi) v0^2.
struct Quadrature {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

Quadrature gauss_hermite(int n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(i / 2.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    Quadrature q;
    q.nodes = solver.eigenvalues();
    q.weights = std::sqrt(std::numbers::pi) * solver.eigenvectors().row(0).array().square();
    return q;
}

// E[f(phi)] for phi ~ N(0, sigma^2).
template <typename F>
double gaussian_average(F f, double sigma, const Quadrature& q) {
    double s = 0.0;
    for (int i = 0; i < q.nodes.size(); ++i) {
        s += q.weights[i] * f(std::sqrt(2.0) * sigma * q.nodes[i]);
    }
    return s / std::sqrt(std::numbers::pi);
}

struct Ideal {
    KerrDerived derived;
    GeometrySpec geometry;
};

Ideal at_operating_point(std::string_view name) {
    const auto& p = preset(name);
    return {derive(p.pulse, p.medium), GeometrySpec{p.arm_length_m, 0.0}};
}

}  // namespace

TEST_CASE("mean_M_exact limits") {
    // Linear interferometer: the envelope is 1.
    CHECK(mean_M_exact(50.0, 0.0, 0.2, 0.9, 0.0, 1.0) ==
          doctest::Approx(50.0 * std::sin(0.7)).epsilon(1e-15));
    // Equal arms with no offset: the sine argument vanishes.
    CHECK(mean_M_exact(50.0, 0.3, 1.7, 1.7, 0.0, 1.0) == 0.0);
    // Value from the dense-operator brute force (tests/oracle/fock_bruteforce.py).
    CHECK(mean_M_exact(4.0, 0.1, 0.30, 0.32, 0.0, 1.0) ==
          doctest::Approx(0.0997897312357609).epsilon(1e-9));
    CHECK(mean_M_exact(4.0, 0.1, 0.30, 0.32, 0.7, 1.0) ==
          doctest::Approx(2.647437851783887).epsilon(1e-9));
    CHECK(mean_M_exact(4.0, 0.1, 0.30, 0.32, 0.7, 0.25) ==
          doctest::Approx(0.25 * 2.647437851783887).epsilon(1e-9));
}

TEST_CASE("detuned form equals the arm-phase form") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double n = 30.0 * std::abs(u(rng));
        const double chi = 0.2 * std::abs(u(rng)) + 1e-3;
        const int m = 1 + i % 3;
        const double detuning = 0.3 * u(rng);
        const double kx = 0.05 * u(rng);
        const double offset = u(rng);
        // k l0 = 2 (m pi + detuning) / chi
        const double k_l0 = 2.0 * (m * std::numbers::pi + detuning) / chi;
        const double direct = mean_M_exact(n, chi, k_l0 - kx / 2, k_l0 + kx / 2, offset, 1.0);
        const double reduced = mean_M_exact_detuned(n, chi, kx, detuning, offset, 1.0);
        CHECK(reduced == doctest::Approx(direct).epsilon(1e-9).scale(std::max(n, 1.0)));
    }
}

TEST_CASE("mean_M_exact symmetries") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double n = 1.0 + 10.0 * std::abs(u(rng));
        const double chi = 0.05 * std::abs(u(rng));
        const double p1 = u(rng);
        const double p2 = u(rng);
        const double off = u(rng);
        const double base = mean_M_exact(n, chi, p1, p2, off, 1.0);
        CHECK(mean_M_exact(n, chi, p1, p2, off + 2.0 * std::numbers::pi, 1.0) ==
              doctest::Approx(base).epsilon(1e-10).scale(n));
        // Swapping the arms negates (phi2 - phi1) and (z2 - z1) at fixed z1 + z2.
        CHECK(mean_M_exact(n, chi, p2, p1, -off, 1.0) ==
              doctest::Approx(-base).epsilon(1e-12).scale(n));
    }
}

TEST_CASE("mean_M_approx") {
    CHECK(mean_M_approx(100.0, 0.2, 3.0, 0.0, 0.4, 0.8) == 0.0);
    CHECK(mean_M_approx(100.0, 0.0, 3.0, 0.1, 0.0, 0.8) ==
          doctest::Approx(80.0 * std::sin(0.3)).epsilon(1e-15));

    SUBCASE("agrees with the exact mean near the operating point") {
        const double n = 1e4;
        const double chi = 1e-3;
        const double kx = 1e-3;
        const int m = 1;
        const double k_l0 = 2.0 * m * std::numbers::pi / chi;
        const double exact = mean_M_exact(n, chi, k_l0 - kx / 2, k_l0 + kx / 2, 0.0, 1.0);
        const double approx = mean_M_approx(n, chi, 1.0, kx, 0.0, 1.0);
        // Dominant difference: the dropped z2 - z1 = chi k x / 2 term inside the sine.
        const double dropped = n * chi * kx / 2.0;
        CHECK(std::abs(exact - approx) <= 1.001 * dropped);
        CHECK(std::abs(exact - approx) >= 0.9 * dropped * std::cos(kx * (1 + chi * n / 2)));
    }

    SUBCASE("sigma enters only through exp(-sigma^2 / 2)") {
        const auto q = gauss_hermite(60);
        for (double sigma : {0.05, 0.2, 0.5}) {
            const double ratio = mean_M_approx(1e4, 1e-3, 1.0, 1e-3, sigma, 0.9) /
                                 mean_M_approx(1e4, 1e-3, 1.0, 1e-3, 0.0, 0.9);
            CHECK(ratio == doctest::Approx(std::exp(-sigma * sigma / 2)).epsilon(1e-14));

            // Quadrature over the relative phase of the exact mean.
            const double p1 = 2 * std::numbers::pi / 1e-3 - 5e-4;
            const double p2 = p1 + 1e-3;
            const double averaged = gaussian_average(
                [&](double phi) { return mean_M_exact(1e4, 1e-3, p1, p2, phi, 0.9); }, sigma, q);
            const double expected =
                std::exp(-sigma * sigma / 2) * mean_M_exact(1e4, 1e-3, p1, p2, 0.0, 0.9);
            CHECK(std::abs(averaged - expected) <= 1e-8 * std::abs(expected));
        }
    }
}

TEST_CASE("mean model dispatch") {
    const auto& g = preset("giant-eit");
    const auto params = g.parameters(1e-16);
    const auto exact = mean_M(MeanVariant::exact, params);
    const auto approx = mean_M(MeanVariant::approx_gauss, params);
    const auto linear = mean_M(MeanVariant::linearized, params);
    CHECK(exact.variant == MeanVariant::exact);
    // Small signal: all three agree to leading order.
    CHECK(approx.value == doctest::Approx(linear.value).epsilon(1e-3));
    CHECK(exact.value == doctest::Approx(linear.value).epsilon(1e-3));
}

TEST_CASE("var_M") {
    CHECK(var_M(123.0, 0.0, 1.0, 0.0, 0.0) == 123.0);
    CHECK(var_M(100.0, 0.0, 0.5, 0.0, 0.0) == 50.0);

    // Pre-approximation form: eta N + eta^2 N^2 / 2 (1 - e^{-2 sigma^2}) + eta N N_t.
    const double exact = var_M(100.0, 0.0, 1.0, 0.1, 2.0, VarianceForm::exact_phase_average);
    CHECK(exact == doctest::Approx(100.0 + 5000.0 * (1.0 - std::exp(-0.02)) + 200.0));
    const double small = var_M(100.0, 0.0, 1.0, 0.1, 2.0);
    CHECK(small == doctest::Approx(400.0).epsilon(1e-15));
    // 0 <= small - exact <= N^2 sigma^4
    CHECK(small - exact >= 0.0);
    CHECK(small - exact <= 100.0 * 100.0 * std::pow(0.1, 4));
}

TEST_CASE("mean_M0_squared") {
    CHECK(mean_M0_squared(7.0, 0.0) == 7.0);
    CHECK(mean_M0_squared(7.0, std::numbers::pi / 2) == doctest::Approx(49.0 + 7.0));
    CHECK(mean_M0_squared(9.0, 0.7) == doctest::Approx(42.616330712540254).epsilon(1e-12));
}

TEST_CASE("delta_x and its linear counterpart") {
    CHECK(delta_x(400.0, 0.0, 2.0, 1.0, 0.0, 0.0) == doctest::Approx(1.0 / (2.0 * 20.0)));
    CHECK(delta_x_linear(400.0, 2.0, 1.0, 0.0) == doctest::Approx(1.0 / 40.0));
    CHECK(delta_x_linear(4.0, 1.0, 1.0, 3.0) == 1.0);

    SUBCASE("natural regime") {
        const auto s = at_operating_point("natural");
        const auto r = sensitivity(s.derived, s.geometry, NoiseSpec{});
        CHECK(within_factor(r.delta_x, 1e-21));
        CHECK(within_factor(r.improvement, 1e-3));
        CHECK(within_factor(r.delta_x_linear, 1e-18));
    }
    SUBCASE("giant-eit regime") {
        const auto s = at_operating_point("giant-eit");
        const auto r = sensitivity(s.derived, s.geometry, NoiseSpec{});
        CHECK(within_factor(r.delta_x, 1e-20));
        CHECK(within_factor(r.improvement, 1e-6));
        // k = 2 pi n0 / lambda and N from derive()
        const double k = 2.0 * std::numbers::pi / 500e-9;
        const double expected_lin = 1.0 / (k * std::sqrt(s.derived.photons));
        CHECK(r.delta_x_linear == doctest::Approx(expected_lin).epsilon(1e-12));
        CHECK(within_factor(r.delta_x_linear, 1e-14));
        CHECK(within_factor(r.delta_x / r.improvement, 1e-20 / 1e-6));
    }
}

TEST_CASE("improvement ratio") {
    CHECK(improvement_ratio(1e6, 0.0, 1.0, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(improvement_ratio(1e8, 1e-2, 1.0, 0.0, 0.0) ==
          doctest::Approx(2.0 / (1e-2 * 1e8)).epsilon(1e-5));
}

TEST_CASE("conjectured scaling") {
    const double base = conjectured_scaling(1e-12, 1e-9, 5e-7, 1e21);
    CHECK(conjectured_scaling(1e-12, 1e-9, 5e-7, 2e21) == base / 4.0);
    CHECK(conjectured_scaling(2e-12, 1e-9, 5e-7, 1e21) == 2.0 * base);
    CHECK(conjectured_scaling(5e-13, 1e-9, 5e-7, 1e21) == doctest::Approx(base / 2.0));

    const auto& nat = preset("natural");
    const auto& gnt = preset("giant-eit");
    const double s_nat = conjectured_scaling(nat.pulse.tau_s, nat.pulse.area_m2,
                                             nat.pulse.wavelength_m,
                                             derive(nat.pulse, nat.medium).photons);
    const double s_gnt = conjectured_scaling(gnt.pulse.tau_s, gnt.pulse.area_m2,
                                             gnt.pulse.wavelength_m,
                                             derive(gnt.pulse, gnt.medium).photons);
    // (100 tau)(1000 A) / (N ratio 1e-7)^2 = 1e5 * 1e14
    CHECK(s_gnt / s_nat == doctest::Approx(1e19).epsilon(1e-12));
}

TEST_CASE("validity flags") {
    const auto giant = at_operating_point("giant-eit");

    SUBCASE("small signal x = 1e-15 m in the giant regime") {
        auto geo = giant.geometry;
        geo.signal_x_m = 1e-15;
        const auto f = validity(giant.derived, geo, NoiseSpec{});
        // chi N k x with chi N = 1e6 and k = 1.2566e7 / m
        CHECK(f.margin_small_signal == doctest::Approx(1e6 * 12566370.614359172 * 1e-15));
        CHECK(f.margin_small_signal < 0.1);
        CHECK_FALSE(f.small_signal);  // 0.0126 is just above the default 1e-2
        CHECK(validity(giant.derived, geo, NoiseSpec{}, Thresholds::uniform(0.1)).small_signal);
        geo.signal_x_m = 1e-16;
        CHECK(validity(giant.derived, geo, NoiseSpec{}).small_signal);
    }
    SUBCASE("sigma = 0.5 spoils the nonlinear advantage") {
        const auto f = validity(giant.derived, giant.geometry, NoiseSpec{1.0, 0.5, 0.0});
        CHECK_FALSE(f.nonlinearity_dominant);
        CHECK_FALSE(f.weak_dephasing);
        CHECK(f.margin_dephasing == 0.5);
    }
    SUBCASE("operating point") {
        const auto f = validity(giant.derived, giant.geometry, NoiseSpec{});
        CHECK(f.on_operating_point);
        CHECK(f.all());
        auto off = giant.geometry;
        off.arm_length_m *= 1.25;  // z0 = 1.25 pi
        const auto g = validity(giant.derived, off, NoiseSpec{});
        CHECK(g.margin_operating_point == doctest::Approx(0.25));
        CHECK_FALSE(g.on_operating_point);
    }
    SUBCASE("linear medium with no noise") {
        auto linear = giant.derived;
        linear.chi = 0.0;
        const auto f = validity(linear, giant.geometry, NoiseSpec{});
        CHECK(f.margin_small_signal == 0.0);
        CHECK(f.margin_thermal == 0.0);
        CHECK(f.margin_dephasing == 0.0);
        CHECK(f.margin_operating_point == 0.0);
        CHECK(f.margin_nl_dominant == 0.0);
        CHECK(f.all());
    }
    SUBCASE("thermal margin") {
        const auto f = validity(giant.derived, giant.geometry, NoiseSpec{1.0, 0.0, 1e12});
        CHECK(f.margin_thermal == doctest::Approx(1e12 / giant.derived.photons));
        CHECK(f.margin_nl_dominant == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("property: algebraic identities over random inputs") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto logu = [&](double lo, double hi) { return std::pow(10.0, lo + (hi - lo) * u(rng)); };
    for (int i = 0; i < 1000; ++i) {
        const double n = logu(0, 22);
        const double k = logu(5, 8);
        const double eta = 0.01 + 0.99 * u(rng);
        const double nt = logu(-3, 3);
        const double chi = logu(-20, -2);
        const double sigma = 0.1 * u(rng);

        // chi = 0, sigma = 0 reduces to the linear interferometer
        REQUIRE(delta_x(n, 0.0, k, eta, 0.0, nt) ==
                doctest::Approx(delta_x_linear(n, k, eta, nt)).epsilon(1e-15));
        // ideal limit ratio law
        REQUIRE(improvement_ratio(n, chi, eta, 0.0, 0.0) * (1.0 + chi * n / 2.0) ==
                doctest::Approx(1.0).epsilon(1e-14));
        // delta_x = sqrt(var_M) / |d<M>/dx| with the linearized slope
        const double slope = eta * n * k * (1.0 + chi * n / 2.0);
        REQUIRE(delta_x(n, chi, k, eta, sigma, nt) ==
                doctest::Approx(std::sqrt(var_M(n, chi, eta, sigma, nt)) / slope).epsilon(1e-12));
        // improvement stays in (0, 1] for chi >= 0 and no dephasing
        const double r = improvement_ratio(n, chi, eta, 0.0, nt);
        REQUIRE(r > 0.0);
        REQUIRE(r <= 1.0);
    }
}

TEST_CASE("slope of the linearized mean matches a finite difference") {
    const double n = 1e6;
    const double chi = 1e-5;
    const double k = 1.2e7;
    const double h = 1e-16;
    const double fd = (mean_M_approx(n, chi, k, h, 0.0, 1.0) -
                       mean_M_approx(n, chi, k, -h, 0.0, 1.0)) / (2.0 * h);
    const double slope = n * k * (1.0 + chi * n / 2.0);
    CHECK(fd == doctest::Approx(slope).epsilon(1e-6));
}

TEST_CASE("monotonicity of delta_x in chi and N") {
    double prev = delta_x(1e6, 0.0, 1e7, 1.0, 0.0, 0.0);
    for (double chi = 1e-9; chi < 1e-3; chi *= 3.0) {
        const double cur = delta_x(1e6, chi, 1e7, 1.0, 0.0, 0.0);
        CHECK(cur < prev);
        prev = cur;
    }
    prev = delta_x(1.0, 1e-4, 1e7, 1.0, 0.0, 0.0);
    for (double n = 2.0; n < 1e12; n *= 2.7) {
        const double cur = delta_x(n, 1e-4, 1e7, 1.0, 0.0, 0.0);
        CHECK(cur < prev);
        prev = cur;
    }
}
