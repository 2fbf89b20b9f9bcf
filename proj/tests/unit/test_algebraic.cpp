#include <doctest.h>

#include <cmath>
#include <random>

#include "critsys/algebraic.hpp"
#include "critsys/errors.hpp"
#include "critsys/regime.hpp"
#include "oracles.hpp"

using namespace critsys;

namespace {

const SystemParams kSym = make_params(3, 0.5, 1.5, 1.0, 1.0, 1.0);
const SystemParams kCaseA = make_params(1, 0.4, 5.0, 1.0, 1.0, 8.0);

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

} // namespace

TEST_CASE("F1 and F2 examples") {
    const SystemParams p0 = kSym.with_gamma(0.0);
    CHECK(eval_F1(p0, p0.k_end(), 0.3) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_F1(p0, p0.k_end(), 7.0) == doctest::Approx(0.0).epsilon(1e-15));

    CHECK(std::abs(eval_F1(kSym, 4.0 / 9.0, 4.0 / 9.0)) < 1e-15);
    CHECK(std::abs(eval_F2(kSym, 4.0 / 9.0, 4.0 / 9.0)) < 1e-15);
    CHECK(eval_F1(kSym, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(eval_F1(kSym, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(eval_F2(kSym, 1.0, 0.0), DomainError);
    CHECK(eval_F1(kCaseA, 0.0, 1.0) == doctest::Approx(-1.0));
}

TEST_CASE("property: F1, F2 agree with the term-by-term oracle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (int i = 0; i < 500; ++i) {
        const double a = 1.05 + 0.85 * u(rng) / 3.0;
        const SystemParams p = make_params(3, 0.5, std::min(a, 1.95), u(rng), u(rng), u(rng) - 1.5);
        const double k = u(rng), l = u(rng);
        CHECK(eval_F1(p, k, l) == doctest::Approx(oracle::F1(3, 0.5, p.alpha(), p.mu1(), p.gamma(), k, l)).epsilon(1e-13));
        CHECK(eval_F2(p, k, l) == doctest::Approx(oracle::F2(3, 0.5, p.alpha(), p.mu2(), p.gamma(), k, l)).epsilon(1e-13));
    }
}

TEST_CASE("property: analytic Jacobian and gamma derivative match finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    for (int i = 0; i < 200; ++i) {
        const int n = 1 + i % 3;
        const double s = 0.3 + 0.1 * (i % 3);
        const double ts = oracle::two_star(n, s);
        const SystemParams q = make_params(n, s, 1.0 + (ts - 2.0) * u(rng) / 2.0, u(rng), u(rng), u(rng) - 1.0);
        const double k = u(rng), l = u(rng);
        const Mat2 J = coupling_jacobian(q, k, l);
        const double h = 1e-6;
        const double dk1 = (eval_F1(q, k + h, l) - eval_F1(q, k - h, l)) / (2 * h);
        const double dl1 = (eval_F1(q, k, l + h) - eval_F1(q, k, l - h)) / (2 * h);
        const double dk2 = (eval_F2(q, k + h, l) - eval_F2(q, k - h, l)) / (2 * h);
        const double dl2 = (eval_F2(q, k, l + h) - eval_F2(q, k, l - h)) / (2 * h);
        CHECK(J[0][0] == doctest::Approx(dk1).epsilon(1e-6));
        CHECK(J[0][1] == doctest::Approx(dl1).epsilon(1e-6));
        CHECK(J[1][0] == doctest::Approx(dk2).epsilon(1e-6));
        CHECK(J[1][1] == doctest::Approx(dl2).epsilon(1e-6));
        const auto dg = coupling_gamma_derivative(q, k, l);
        const double g = q.gamma();
        CHECK(dg[0] == doctest::Approx((eval_F1(q.with_gamma(g + h), k, l) - eval_F1(q.with_gamma(g - h), k, l)) / (2 * h)).epsilon(1e-6));
        CHECK(dg[1] == doctest::Approx((eval_F2(q.with_gamma(g + h), k, l) - eval_F2(q.with_gamma(g - h), k, l)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("curve l(k) examples and defining identity") {
    CHECK(curve_l_of_k(kSym, kSym.k_end()) == 0.0);
    CHECK(curve_l_of_k(kSym, 4.0 / 9.0) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(curve_k_of_l(kSym, 4.0 / 9.0) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK_THROWS_AS(curve_l_of_k(kSym, 1.5), DomainError);
    CHECK_THROWS_AS(curve_l_of_k(kSym, 0.0), DomainError);
    CHECK_THROWS_AS(curve_l_of_k(kSym.with_gamma(-1.0), 0.5), DomainError);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const SystemParams p = make_params(3, 0.5, 1.1 + 0.8 * u(rng), 0.3 + 2 * u(rng), 0.3 + 2 * u(rng), 0.1 + 3 * u(rng));
        const double k = p.k_end() * (1e-4 + (1 - 2e-4) * u(rng));
        const double l = curve_l_of_k(p, k);
        CHECK(l == doctest::Approx(oracle::l_of_k(3, 0.5, p.alpha(), p.mu1(), p.gamma(), k)).epsilon(1e-12));
        CHECK(std::abs(eval_F1(p, k, l)) <= 1e-12);
        const double lk = p.l_end() * (1e-4 + (1 - 2e-4) * u(rng));
        CHECK(std::abs(eval_F2(p, curve_k_of_l(p, lk), lk)) <= 1e-12);
    }
}

TEST_CASE("analytic l'(k) matches finite differences away from the endpoints") {
    const SystemParams p = make_params(3, 0.5, 1.3, 1.2, 0.8, 0.9);
    for (int i = 1; i < 50; ++i) {
        const double k = p.k_end() * i / 50.0;
        const double h = 1e-6 * k;
        const double fd = (curve_l_of_k(p, k + h) - curve_l_of_k(p, k - h)) / (2 * h);
        CHECK(curve_l_prime(p, k) == doctest::Approx(fd).epsilon(1e-6));
        const double l = p.l_end() * i / 50.0;
        const double hl = 1e-6 * l;
        const double fdl = (curve_k_of_l(p, l + hl) - curve_k_of_l(p, l - hl)) / (2 * hl);
        CHECK(curve_k_prime(p, l) == doctest::Approx(fdl).epsilon(1e-6));
    }
}

TEST_CASE("f(k) endpoint value, sign at small k, and symmetric root") {
    // Endpoint: (βγ/2*) μ1^{-α/β}; μ1 != 1 distinguishes the exponent sign.
    const SystemParams p = make_params(3, 0.5, 1.2, 2.0, 0.7, 1.3);
    const double expected = p.beta() * p.gamma() / p.two_star() * std::pow(p.mu1(), -p.alpha() / p.beta());
    CHECK(eval_f(p, p.k_end()).value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(eval_f(p, p.k_end()).value > 0.0);

    CHECK(eval_f(kSym, 1e-10).value < 0.0);
    const FValue tiny = eval_f(kSym, 1e-300);
    CHECK(tiny.value < 0.0);
    CHECK(std::isfinite(tiny.value));

    CHECK(std::abs(eval_f(kSym, 4.0 / 9.0).value) < 1e-14);
    CHECK(std::abs(eval_F2(kSym, 4.0 / 9.0, curve_l_of_k(kSym, 4.0 / 9.0))) < 1e-14);
}

TEST_CASE("property: sign of f(k) equals sign of F2 on the curve") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const SystemParams p = make_params(3, 0.5, 1.1 + 0.8 * u(rng), 0.3 + 2 * u(rng), 0.3 + 2 * u(rng), 0.1 + 3 * u(rng));
        const double k = p.k_end() * (1e-3 + 0.998 * u(rng));
        const double F2 = eval_F2(p, k, curve_l_of_k(p, k));
        const double f = eval_f(p, k).value;
        if (std::abs(F2) > 1e-9) CHECK((F2 > 0) == (f > 0));
    }
}

TEST_CASE("find_k0_l0 spec examples") {
    // γ = 1 and γ = 8 sit exactly on their thresholds, where the root of f
    // is triple; bisection then resolves k0 only to about eps^{1/3}.
    const CouplingSolution s1 = find_k0_l0(kSym);
    CHECK(s1.k == doctest::Approx(4.0 / 9.0).epsilon(1e-5));
    CHECK(s1.l == doctest::Approx(4.0 / 9.0).epsilon(1e-5));
    CHECK(s1.res1 <= 1e-12);
    CHECK(s1.res2 <= 1e-12);

    const CouplingSolution s2 = find_k0_l0(kCaseA);
    CHECK(s2.k == doctest::Approx(std::pow(5.0, -0.25)).epsilon(1e-5));
    CHECK(s2.l == doctest::Approx(0.66874).epsilon(1e-5));

    // Off the threshold the symmetric root is simple and resolved to 1e-12.
    const CouplingSolution s3 = find_k0_l0(kSym.with_gamma(1.7));
    CHECK(rel(s3.k, oracle::symmetric_level(3, 0.5, 1.0, 1.7)) < 1e-12);
    CHECK(rel(s3.l, oracle::symmetric_level(3, 0.5, 1.0, 1.7)) < 1e-12);
    const CouplingSolution s4 = find_k0_l0(kCaseA.with_gamma(4.0));
    CHECK(rel(s4.k, oracle::symmetric_level(1, 0.4, 1.0, 4.0)) < 1e-12);
}

TEST_CASE("find_k0_l0 at small gamma approaches the decoupled pair") {
    const SystemParams p = make_params(3, 0.5, 1.5, 1.0, 2.0, 0.0);
    const CouplingSolution d = find_k0_l0(p);
    CHECK(d.k == p.k_end());
    CHECK(d.l == p.l_end());
    // For μ1 != μ2 the branch near 0 is in case B but below threshold; the
    // scan selects the leftmost root, which need not be the continuation.
    const SystemParams q = make_params(4, 0.5, 1.2, 1.0, 1.0, 1e-6);
    const double k0 = oracle::symmetric_level(4, 0.5, 1.0, 0.0);
    CouplingSolution s;
    REQUIRE_NOTHROW(s = find_k0_l0(q));
    CHECK(s.res1 <= 1e-12);
    CHECK(s.k <= k0);
}

TEST_CASE("find_k0_l0 rejects parameters outside the lemma hypotheses") {
    CHECK_THROWS_AS(find_k0_l0(kSym.with_gamma(-0.5)), DomainError);
    // n = 3, s = 0.5 with α = 1.2 gives β = 1.8 < 2 (case B) but n = 2, s = 0.6 gives 2* = 6.
    const SystemParams mixed = make_params(2, 0.6, 1.5, 1.0, 1.0, 1.0);  // α < 2 < β
    try {
        find_k0_l0(mixed);
        FAIL("expected domain error");
    } catch (const DomainError& e) {
        CHECK(e.constraint() == "regime_hypotheses");
    }
}

TEST_CASE("property: symmetric closed form across random parameters") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int tested = 0;
    for (int i = 0; i < 60; ++i) {
        const bool case_a = i % 2 == 0;
        const int n = case_a ? 1 + static_cast<int>(u(rng) * 3) : 3 + static_cast<int>(u(rng) * 3);
        // case A: 2s < n < 4s; case B: n > 4s.
        const double s = case_a ? n / 4.0 + (std::min(0.99, n / 2.0) - n / 4.0) * (0.05 + 0.9 * u(rng))
                                : std::min(0.99, n / 4.0) * (0.1 + 0.85 * u(rng));
        if (!(s < 1.0) || !(n > 2 * s)) continue;
        const double ts = oracle::two_star(n, s);
        const double mu = 0.2 + 3 * u(rng);
        const SystemParams base = make_params(n, s, ts / 2.0, mu, mu, 1.0);
        const double gamma = case_a ? gamma_threshold_a(base) * (0.05 + 0.9 * u(rng))
                                    : gamma_threshold_b(base) * (1.05 + 3 * u(rng));
        const CouplingSolution sol = find_k0_l0(base.with_gamma(gamma));
        const double expect = oracle::symmetric_level(n, s, mu, gamma);
        CHECK(rel(sol.k, expect) < 1e-10);
        CHECK(rel(sol.l, expect) < 1e-10);
        ++tested;
    }
    CHECK(tested >= 40);
}

TEST_CASE("find_k0_l0 selects the leftmost root when f has several") {
    // Below threshold B this system has a tiny-k root near 5.5e-4.
    const SystemParams p = make_params(3, 0.5, 1.5, 1.0, 1.0, 0.3);
    const CouplingSolution s = find_k0_l0(p);
    CHECK(s.k < 1e-3);
    CHECK(s.res1 <= 1e-12);
    CHECK(s.res2 <= 1e-12);
    // Brute-force oracle: no sign change of F2 on the curve left of k0.
    double prev = eval_F2(p, 1e-8 * p.k_end(), curve_l_of_k(p, 1e-8 * p.k_end()));
    for (int i = 1; i <= 2000; ++i) {
        const double k = 1e-8 * p.k_end() * std::pow(s.k * 0.999 / (1e-8 * p.k_end()), i / 2000.0);
        const double v = eval_F2(p, k, curve_l_of_k(p, k));
        CHECK((v < 0) == (prev < 0));
        prev = v;
    }
}

TEST_CASE("ratio reduction") {
    const SystemParams below = kCaseA.with_gamma(4.0);
    const RatioReduction r = solve_ratio_reduction(below);
    CHECK(r.x0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.y0 == doctest::Approx(2.0 * oracle::symmetric_level(1, 0.4, 1.0, 4.0)).epsilon(1e-12));

    const RatioReduction at = solve_ratio_reduction(kCaseA);
    CHECK(at.y0 == doctest::Approx(2.0 * std::pow(5.0, -0.25)).epsilon(1e-10));

    const SystemParams heavy = make_params(1, 0.4, 5.0, 1.0, 2.0, 8.0);
    const Regime rg = classify(heavy);
    REQUIRE(rg.label == RegimeLabel::attained_a);
    const RatioReduction h = solve_ratio_reduction(heavy);
    CHECK(h.x0 > 1.0);
    // Brute-force sign oracle: f1 - f2 changes sign between 1 and x0 * 1.001.
    CHECK(ratio_f1(heavy, 1.0) > ratio_f2(heavy, 1.0));
    CHECK(ratio_f1(heavy, h.x0 * 1.001) < ratio_f2(heavy, h.x0 * 1.001));

    const CouplingSolution direct = find_k0_l0(heavy);
    CHECK(h.solution.k == doctest::Approx(direct.k).epsilon(1e-8));
    CHECK(h.solution.l == doctest::Approx(direct.l).epsilon(1e-8));
}

TEST_CASE("property: ratio reduction agrees with find_k0_l0 under threshold A") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const double ts = 10.0;
        const double a = 2.2 + (ts - 4.4) * u(rng);
        const SystemParams base = make_params(1, 0.4, a, 0.5 + u(rng), 0.5 + u(rng), 1.0);
        const SystemParams p = base.with_gamma(gamma_threshold_a(base) * (0.1 + 0.85 * u(rng)));
        const RatioReduction r = solve_ratio_reduction(p);
        const CouplingSolution s = find_k0_l0(p);
        CHECK(r.solution.k == doctest::Approx(s.k).epsilon(1e-8));
        CHECK(r.solution.l == doctest::Approx(s.l).epsilon(1e-8));
    }
}

TEST_CASE("ratio reduction flags monotonicity loss above threshold A") {
    const SystemParams above = make_params(1, 0.4, 3.0, 1.0, 1.0, 1.0);
    const SystemParams p = above.with_gamma(gamma_threshold_a(above) * 30.0);
    try {
        solve_ratio_reduction(p);
        FAIL("expected monotonicity violation");
    } catch (const NumericalError& e) {
        CHECK(e.code() == "monotonicity_violation");
    }
}

TEST_CASE("curve diagnostics and slope minima") {
    const CurveDiagnostics d = curve_diagnostics(kSym);
    CHECK(d.lprime_min == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(d.lprime_min + 1.0) <= 1e-10);
    CHECK(d.lprime_min_grid >= -1.0 - 1e-6);
    CHECK(d.k_infl == doctest::Approx(std::pow(2.0 * 0.5 / (1.5 * 1.0), 2.0)).epsilon(1e-14));

    // lprime_min scales as γ^{-2/β}: γ = 0.5 gives -2^{4/3}, γ = 2 gives -2^{-4/3}.
    CHECK(lprime_min_closed_form(kSym.with_gamma(0.5)) == doctest::Approx(-std::pow(2.0, 4.0 / 3.0)).epsilon(1e-12));
    CHECK(lprime_min_closed_form(kSym.with_gamma(2.0)) == doctest::Approx(-std::pow(2.0, -4.0 / 3.0)).epsilon(1e-12));

    CHECK_THROWS_AS(curve_diagnostics(kCaseA), DomainError);
}

TEST_CASE("property: closed-form slope minimum matches the grid for asymmetric parameters") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const int n = 3 + i % 3;
        const double ts = oracle::two_star(n, 0.5);
        const SystemParams p = make_params(n, 0.5, 1.0 + (ts - 2.0) * (0.05 + 0.9 * u(rng)), 0.5 + u(rng), 0.5 + u(rng), 0.2 + 2 * u(rng));
        const CurveDiagnostics d = curve_diagnostics(p);
        CHECK(d.lprime_min_grid == doctest::Approx(d.lprime_min).epsilon(1e-6));
        CHECK(d.kprime_min_grid == doctest::Approx(d.kprime_min).epsilon(1e-6));
        CHECK(curve_l_prime(p, d.k_infl) == doctest::Approx(d.lprime_min).epsilon(1e-9));
        CHECK(std::abs(curve_l_prime(p, d.k_star_l)) < 1e-9);
    }
}

TEST_CASE("domination examples") {
    const CouplingSolution sol = find_k0_l0(kCaseA);
    CHECK(domination_margin(kCaseA, sol, sol.k, sol.l) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_F1(kCaseA, 2 * sol.k, 2 * sol.l) > 0.0);
    CHECK(eval_F2(kCaseA, 2 * sol.k, 2 * sol.l) > 0.0);
    CHECK(domination_margin(kCaseA, sol, 2 * sol.k, 2 * sol.l) > 0.0);

    const DominationReport r = check_domination(kCaseA, sol, 10000, 1);
    CHECK(r.violations == 0);
    CHECK(r.feasible > 1000);
    CHECK(r.worst_margin >= -1e-9);
}

TEST_CASE("domination: brute-force grid oracle over the feasible set") {
    const SystemParams p = kCaseA.with_gamma(5.0);
    const CouplingSolution sol = find_k0_l0(p);
    double best = INFINITY;
    for (int i = 0; i < 400; ++i) {
        for (int j = 0; j < 400; ++j) {
            const double c = 0.01 + 1.5 * i / 399.0;
            const double d = 0.01 + 1.5 * j / 399.0;
            if (oracle::F1(1, 0.4, 5.0, 1.0, 5.0, c, d) >= 0 && oracle::F2(1, 0.4, 5.0, 1.0, 5.0, c, d) >= 0) {
                best = std::min(best, c + d);
            }
        }
    }
    CHECK(best >= sol.k + sol.l - 1e-9);
    CHECK(best <= sol.k + sol.l + 0.01);
}

TEST_CASE("domination raises a counterexample for a wrong solution") {
    CouplingSolution wrong = find_k0_l0(kCaseA);
    wrong.k *= 1.2;
    wrong.l *= 1.2;
    try {
        check_domination(kCaseA, wrong, 10000, 1);
        FAIL("expected a counterexample");
    } catch (const CounterexampleError& e) {
        CHECK(e.margin() < -1e-9);
        CHECK(e.code() == "counterexample");
    }
    CHECK_THROWS_AS(check_domination(kSym.with_gamma(0.5), wrong, 10, 1), DomainError);
}

TEST_CASE("property: swapping components swaps the solution") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const SystemParams base = make_params(3, 0.5, 1.2 + 0.6 * u(rng), 0.5 + u(rng), 0.5 + u(rng), 1.0);
        const SystemParams p = base.with_gamma(gamma_threshold_b(base) * (1.1 + u(rng)));
        const CouplingSolution a = find_k0_l0(p);
        const CouplingSolution b = find_k0_l0(p.swapped());
        CHECK(a.k == doctest::Approx(b.l).epsilon(1e-9));
        CHECK(a.l == doctest::Approx(b.k).epsilon(1e-9));
    }
}
