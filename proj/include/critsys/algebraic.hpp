#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "critsys/params.hpp"

namespace critsys {

/// A solution (k, l) of
///
///   μ1 k^{(2*-2)/2} + (αγ/2*) k^{(α-2)/2} l^{β/2} = 1
///   μ2 l^{(2*-2)/2} + (βγ/2*) k^{α/2} l^{(β-2)/2} = 1
///
/// together with the re-evaluated residuals |F1|, |F2|.
struct CouplingSolution {
    double k = 0;
    double l = 0;
    double res1 = 0;
    double res2 = 0;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

/// x^e for x >= 0. Throws DomainError for x < 0 or for x == 0 with e < 0.
double pos_pow(double x, double e);

double eval_F1(const SystemParams& p, double k, double l);
double eval_F2(const SystemParams& p, double k, double l);

/// Analytic Jacobian [[dF1/dk, dF1/dl], [dF2/dk, dF2/dl]] at k, l > 0.
Mat2 coupling_jacobian(const SystemParams& p, double k, double l);

/// Partial derivatives (dF1/dγ, dF2/dγ).
std::array<double, 2> coupling_gamma_derivative(const SystemParams& p, double k, double l);

/// The branch l(k) of F1 = 0, defined for γ > 0 and 0 < k <= μ1^{-2/(2*-2)}.
double curve_l_of_k(const SystemParams& p, double k);
/// The branch k(l) of F2 = 0, defined for γ > 0 and 0 < l <= μ2^{-2/(2*-2)}.
double curve_k_of_l(const SystemParams& p, double l);

/// Analytic l'(k) on the open interval (0, μ1^{-2/(2*-2)}).
double curve_l_prime(const SystemParams& p, double k);
double curve_k_prime(const SystemParams& p, double l);

/// F2 restricted to the curve l(k) and rescaled by a positive factor:
///
///   f(k) = μ2 A^{α/β} w^{α/β} + (βγ/2*) k^{(2*-2)α/(2β)} - A^{(2-β)/β} k^{-(2*-2)(2-α)/(2β)} w^{(2-β)/β}
///
/// with A = 2*/(αγ), w = 1 - μ1 k^{(2*-2)/2}. Has the sign of F2(k, l(k)).
/// Near k -> 0 the value can overflow; it is then clamped to a large
/// negative (or positive) sentinel and `clamped` is set.
struct FValue {
    double value = 0;
    bool clamped = false;
};
FValue eval_f(const SystemParams& p, double k);

/// Largest magnitude eval_f reports before clamping.
inline constexpr double kFSentinel = 1e300;

/// Leftmost root of f on the scan window, i.e. the solution of the
/// coupling system with minimal k.
///
/// γ = 0 returns the decoupled pair without root finding. For γ > 0 the
/// parameters must satisfy either n > 4s with 1 < α, β < 2 or
/// 2s < n < 4s with α, β > 2.
CouplingSolution find_k0_l0(const SystemParams& p, double tol = 1e-12);

/// Result of the ratio reduction x = k/l, y = k + l.
struct RatioReduction {
    double x0 = 0;
    double y0 = 0;
    CouplingSolution solution;
};

double ratio_f1(const SystemParams& p, double x);
double ratio_f2(const SystemParams& p, double x);

/// Solves f1(x0) = f2(x0) by bisection in log x after checking that f1 is
/// decreasing and f2 increasing on a 10^3-point log grid.
/// Requires 2s < n < 4s, α, β > 2 and 0 < γ <= gamma_threshold_a(p).
RatioReduction solve_ratio_reduction(const SystemParams& p, double tol = 1e-12);

struct CurveDiagnostics {
    double k_star_l = 0;      ///< l'(k) changes sign here
    double k_infl = 0;        ///< l''(k) = 0
    double lprime_min = 0;    ///< closed form l'(k_infl)
    double lprime_min_grid = 0;  ///< min of central differences on a 10^4 grid
    double l_star_k = 0;
    double l_infl = 0;
    double kprime_min = 0;
    double kprime_min_grid = 0;
};

/// Requires n > 4s (so 2* < 4), 1 < α, β < 2, γ > 0.
CurveDiagnostics curve_diagnostics(const SystemParams& p);

/// Closed-form minimal slope of l(k).
double lprime_min_closed_form(const SystemParams& p);
double kprime_min_closed_form(const SystemParams& p);

/// Minimum over `points` uniformly spaced interior k of the central
/// difference quotient of l(k).
double lprime_grid_min(const SystemParams& p, std::size_t points = 10000);
double kprime_grid_min(const SystemParams& p, std::size_t points = 10000);

struct DominationReport {
    std::size_t samples = 0;
    std::size_t feasible = 0;
    std::size_t violations = 0;
    double worst_margin = 0;  ///< min over feasible samples of (c+d) - (k0+l0)
    double worst_c = 0;
    double worst_d = 0;
};

/// Margin (c+d) - (k0+l0) if F1(c,d) >= 0 and F2(c,d) >= 0, NaN otherwise.
double domination_margin(const SystemParams& p, const CouplingSolution& sol, double c, double d);

/// Randomized check that every feasible pair dominates the solution:
/// draws `samples` log-uniform pairs in [k0/10, 10 max(k0, μ1^{-2/(2*-2)})] x
/// [l0/10, 10 max(l0, μ2^{-2/(2*-2)})]. Requires an attained regime.
/// Throws CounterexampleError on the first violation.
DominationReport check_domination(const SystemParams& p, const CouplingSolution& sol,
                                  std::size_t samples, std::uint64_t seed);

} // namespace critsys
