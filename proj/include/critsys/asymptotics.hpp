#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "critsys/algebraic.hpp"
#include "critsys/params.hpp"

namespace critsys {

// ---------------------------------------------------------------- overlap

/// Quadrature controls for overlap integrals.
///
/// The integrals are axisymmetric about the e1 axis, so they reduce to
/// (x1, ρ) with weight ω_{n-2} ρ^{n-2}; both directions use Gauss-Legendre
/// panels refined geometrically toward the bubble centers.
struct QuadratureSpec {
    double epsilon = 1.0;
    double box_half_width = 0.0;  ///< 0 selects |shift| + R + 200 ε
    double shift = 0.0;           ///< common translation of both centers along e1
};

struct OverlapDatum {
    double R = 0;
    double theta = 0;
    double overlap_integral = 0;  ///< ∫ ũ^α ũ(· + R e1)^β
    double mass_integral = 0;     ///< ∫ ũ^{2*}
    double tail_estimate = 0;     ///< relative change under box doubling
};

/// ∫ ũ^α ũ(x + R e1)^β dx for the unit-amplitude bubble of scale ε.
/// Throws NumericalError("quadrature") if box doubling changes it by more than 10%.
double overlap_integral(const SystemParams& p, double R, const QuadratureSpec& q = {});

/// θ = ∫U^α V_R^β / ∫μ1 U^{2*} with U = w_{μ1}, V_R = w_{μ2}(· + R e1),
/// which equals μ1^{(2-α)/(2*-2)} μ2^{-β/(2*-2)} I_R / I_0.
OverlapDatum overlap_theta(const SystemParams& p, double R, const QuadratureSpec& q = {});

/// Same overlap normalized against the second bubble:
/// θ2 = θ · (μ2/μ1)^{(n-2s)/2s}.
double overlap_theta_second(const SystemParams& p, double theta);

// ---------------------------------------------------------------- perturbation

struct PerturbationConstants {
    Mat2 B{};
    std::array<double, 2> c{};
    double B_norm = 0;  ///< induced max-norm
    double c_norm = 0;  ///< max-norm
};

/// a1 = -(αγ/2*)(α-2)/(2*-2), b1 = -(αγ/2*)β/(2*-2), c1 = -(αγ/2*)·2/(2*-2),
/// a2 = -(βγ/2*)α/(2*-2), b2 = -(βγ/2*)(β-2)/(2*-2), c2 = -(βγ/2*)·2/(2*-2).
PerturbationConstants perturbation_constants(const SystemParams& p);

struct PerturbationSolution {
    double tR = 1;
    double sR = 1;
    int iterations = 0;
    double defect = 0;  ///< max |G_i| at the returned point
    double c_norm = 0;
    double theta = 0;
};

/// Residuals of
///   t^{(2*-2)/2} + (αγ/2*) t^{(α-2)/2} s^{β/2} θ1 - 1
///   s^{(2*-2)/2} + (βγ/2*) t^{α/2} s^{(β-2)/2} θ2 - 1
std::array<double, 2> perturbation_residual(const SystemParams& p, double t, double s, double theta1,
                                            double theta2);

/// Chord iteration x <- x - (p(I - ΘB))^{-1} G(1 + x) from x = 0, where the
/// linearized map preconditions the exact residual G.
///
/// Requires 0 <= θ <= 0.1 and θ ||B|| <= 1/2 (DomainError otherwise);
/// throws NumericalError("divergence") after 200 iterations.
PerturbationSolution solve_tR_sR(const SystemParams& p, double theta, double tol = 1e-12);
PerturbationSolution solve_tR_sR(const SystemParams& p, double theta1, double theta2, double tol);

struct GapRow {
    double R = 0;
    double theta1 = 0;
    double theta2 = 0;
    double tR = 1;
    double sR = 1;
    double bound = 0;     ///< tR μ1^{-(n-2s)/2s} + sR μ2^{-(n-2s)/2s}
    double limit = 0;     ///< μ1^{-(n-2s)/2s} + μ2^{-(n-2s)/2s}
    double rel_gap = 0;   ///< (bound - limit) / limit
    int iterations = 0;
};

/// Energy upper bound from two separated bubbles at each R. Requires γ < 0.
std::vector<GapRow> energy_gap_vs_R(const SystemParams& p, const std::vector<double>& R_list,
                                    const QuadratureSpec& q = {});

// ---------------------------------------------------------------- continuation

struct ContinuationSample {
    double gamma = 0;
    double k = 0;
    double l = 0;
    double res1 = 0;
    double res2 = 0;
    double jac_cond = 0;
    bool ordering_ok = false;
};

struct ContinuationPath {
    std::vector<ContinuationSample> samples;
    std::optional<std::pair<double, double>> gamma1_bracket;
    bool fold_detected = false;  ///< cond(J) above 1e12 or step collapse; branch truncated there
    double initial_step = 0;
};

/// 2x2 condition number in the max-norm.
double condition_number(const Mat2& J);

/// Traces (k(γ), l(γ)) from γ = 0 to gamma_max with an Euler predictor and
/// a Newton corrector. step <= 0 selects gamma_threshold_b / 100. The step
/// halves on corrector failure; once it drops below 1e-14 max(1, gamma_max)
/// the branch is treated as folded and truncated. Requires 1 < α, β < 2 and gamma_max > 0.
ContinuationPath continuation_branch(const SystemParams& base, double gamma_max, double step = 0.0,
                                     double tol = 1e-12);

} // namespace critsys
