#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "critsys/bubble.hpp"
#include "critsys/errors.hpp"
#include "critsys/params.hpp"
#include "oracles.hpp"

using namespace critsys;

TEST_CASE("bubble values") {
    const BubbleSpec unit{};
    const std::vector<double> origin{0.0, 0.0, 0.0};
    CHECK(bubble_eval(unit, 3, 0.5, origin) == doctest::Approx(1.0).epsilon(1e-15));
    // (1 + 3)^{-1}
    const std::vector<double> x{1.0, 1.0, 1.0};
    CHECK(bubble_eval(unit, 3, 0.5, x) == doctest::Approx(0.25).epsilon(1e-15));

    BubbleSpec shifted{2.0, {1.0, 0.0, 0.0}, 3.0};
    const std::vector<double> c{1.0, 0.0, 0.0};
    CHECK(bubble_eval(shifted, 3, 0.5, c) == doctest::Approx(3.0 / 4.0).epsilon(1e-15));
    // 1D, s = 0.4: exponent -(1 - 0.8)/2 = -0.1
    const std::vector<double> y{2.0};
    CHECK(bubble_eval(unit, 1, 0.4, y) == doctest::Approx(std::pow(5.0, -0.1)).epsilon(1e-14));
}

TEST_CASE("bubble argument checks") {
    const std::vector<double> x{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(bubble_eval(BubbleSpec{0.0, {}, 1.0}, 3, 0.5, x), DomainError);
    CHECK_THROWS_AS(bubble_eval(BubbleSpec{1.0, {}, 0.0}, 3, 0.5, x), DomainError);
    CHECK_THROWS_AS(bubble_eval(BubbleSpec{1.0, {1.0, 2.0}, 1.0}, 3, 0.5, x), DomainError);
}

TEST_CASE("property: bubble scaling identity") {
    // With unit κ: U_ε(εx) = ε^{-(n-2s)} U_1(x).
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const int n = 3;
        const double s = 0.1 + 0.8 * (u(rng) + 3.0) / 6.0;
        const double eps = std::exp(u(rng) / 2.0);
        const std::vector<double> x{u(rng), u(rng), u(rng)};
        const std::vector<double> ex{eps * x[0], eps * x[1], eps * x[2]};
        const double lhs = bubble_eval(BubbleSpec{eps, {}, 1.0}, n, s, ex);
        const double rhs = std::pow(eps, -(n - 2 * s)) * bubble_eval(BubbleSpec{}, n, s, x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("closed-form Sobolev constant") {
    // n = 3, s = 1/2: 2 √π (Γ(3/2)/Γ(3))^{1/3} = 2 √π (√π / 4)^{1/3}
    const double expected = 2.0 * std::sqrt(std::numbers::pi) * std::cbrt(std::sqrt(std::numbers::pi) / 4.0);
    const SobolevConstant c = sobolev_constant_closed_form(3, 0.5);
    CHECK(c.value == doctest::Approx(expected).epsilon(1e-14));
    CHECK(c.value == doctest::Approx(2.7025677).epsilon(1e-7));
    CHECK(c.method == SobolevMethod::closed_form);
    CHECK(c.est_error == 0.0);
    CHECK(sobolev_constant_closed_form(1, 0.4).value > 0.0);
    for (double s : {0.3, 0.5, 0.7}) {
        CHECK(sobolev_constant_closed_form(3, s).value > 0.0);
    }
}

TEST_CASE("property: closed form agrees with the tgamma oracle") {
    for (int n = 1; n <= 6; ++n) {
        for (double s = 0.05; s < std::min(1.0, n / 2.0); s += 0.05) {
            CHECK(sobolev_constant_closed_form(n, s).value == doctest::Approx(oracle::sobolev(n, s)).epsilon(1e-12));
        }
    }
}

TEST_CASE("spectral Sobolev estimate near the closed form") {
    const SobolevConstant exact = sobolev_constant_closed_form(3, 0.5);
    const SobolevConstant est = sobolev_constant_spectral(3, 0.5, 30.0, 64, 1.0);
    CHECK(est.method == SobolevMethod::spectral_estimate);
    CHECK(std::abs(est.value - exact.value) / exact.value < 0.02);
    CHECK(est.est_error > 0.0);
    // No quotient undercuts the sharp constant by more than discretization.
    CHECK(est.value > exact.value * 0.98);
}

TEST_CASE("spectral estimate argument checks") {
    CHECK_THROWS_AS(sobolev_constant_spectral(4, 0.5, 30.0, 16), DomainError);
    CHECK_THROWS_AS(sobolev_constant_spectral(3, 0.5, 30.0, 48), DomainError);
    CHECK_THROWS_AS(sobolev_constant_spectral(3, 0.5, -1.0, 32), DomainError);
    CHECK_THROWS_AS(validate_grid(2, 1.0, 2), DomainError);
    CHECK_NOTHROW(validate_grid(2, 1.0, 4));
}

TEST_CASE("property: Rayleigh quotient is amplitude invariant") {
    const GridField u = sample_bubble(3, 0.5, 20.0, 32, BubbleSpec{1.0, {}, 1.0});
    const double q = rayleigh_quotient(u, 0.5);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int i = 0; i < 10; ++i) {
        const double c = std::exp(d(rng)) * (i % 2 ? -1.0 : 1.0);
        GridField v = u;
        for (double& x : v.values()) x *= c;
        CHECK(std::abs(rayleigh_quotient(v, 0.5) - q) <= 1e-12 * q);
    }
}

TEST_CASE("property: spectral error estimate does not grow with the box") {
    const SobolevConstant a = sobolev_constant_spectral(2, 0.5, 40.0, 256, 1.0);
    const SobolevConstant b = sobolev_constant_spectral(2, 0.5, 80.0, 512, 1.0);
    CHECK(b.est_error <= a.est_error * 1.05);
}

TEST_CASE("normalized bubble mass and positivity") {
    const SystemParams p = make_params(3, 0.5, 1.5, 1, 1, 1);
    const double S = sobolev_constant_closed_form(p).value;
    const GridField U = normalized_bubble(p, BubbleSpec{}, S, 20.0, 32);
    const double mass = U.integral_abs_pow(p.two_star());
    CHECK(mass == doctest::Approx(std::pow(S, 3.0)).epsilon(1e-12));

    // The grid mass is pinned; scaling by the continuum norm instead must land close.
    const double ts = p.two_star();
    double continuum = 0.0;
    {
        const GridField raw = sample_bubble(3, 0.5, 20.0, 128, BubbleSpec{});
        const double c = std::pow(S, 1.0 / (ts - 2.0)) / std::pow(oracle::bubble_mass(3, 1.0), 1.0 / ts);
        GridField cont = raw;
        for (double& x : cont.values()) x *= c;
        continuum = cont.integral_abs_pow(ts) / std::pow(S, 3.0);
    }
    CHECK(continuum >= 0.97);
    CHECK(continuum <= 1.03);

    for (std::size_t i = 0; i < U.size(); ++i) {
        CHECK(U[i] > 0.0);
        CHECK(U[i] == doctest::Approx(U[U.reflected_index(i)]).epsilon(1e-14));
    }
}

TEST_CASE("property: normalized bubble does not depend on kappa") {
    const SystemParams p = make_params(2, 0.6, 1.5, 1, 1, 1);
    const double S = sobolev_constant_closed_form(p).value;
    const GridField a = normalized_bubble(p, BubbleSpec{1.0, {}, 1.0}, S, 16.0, 32);
    for (double kappa : {0.01, 3.0, 250.0, -2.0}) {
        const GridField b = normalized_bubble(p, BubbleSpec{1.0, {}, kappa}, S, 16.0, 32);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst = std::max(worst, std::abs(std::abs(b[i]) - a[i]) / a[i]);
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("property: spectral estimate is stable under epsilon rescaling") {
    const SobolevConstant a = sobolev_constant_spectral(3, 0.5, 30.0, 64, 1.0);
    const SobolevConstant b = sobolev_constant_spectral(3, 0.5, 30.0, 64, 1.5);
    CHECK(std::abs(a.value - b.value) / a.value < 0.05);
}
