#include "critsys/asymptotics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "critsys/errors.hpp"
#include "critsys/regime.hpp"

namespace critsys {

// ---------------------------------------------------------------- overlap

namespace {

using Gauss = boost::math::quadrature::gauss<double, 30>;

/// Panel edges in [lo, hi]: every center plus geometric offsets ε 2^j.
std::vector<double> graded_breaks(double lo, double hi, const std::vector<double>& centers, double eps) {
    std::vector<double> b{lo, hi};
    const double span = hi - lo;
    for (double c : centers) {
        if (c > lo && c < hi) b.push_back(c);
        for (double d = 0.5 * eps; d < 2.0 * span; d *= 2.0) {
            for (double x : {c - d, c + d}) {
                if (x > lo && x < hi) b.push_back(x);
            }
        }
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

template <class Fn>
double panel_sum(const std::vector<double>& breaks, Fn&& fn) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) acc += Gauss::integrate(fn, breaks[i], breaks[i + 1]);
    return acc;
}

/// Surface measure of the unit sphere in R^{n-1}.
double transverse_sphere(int n) {
    const double m = n - 1;
    return 2.0 * std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0);
}

/// ∫ (ε² + |x - a|²)^{-hα} (ε² + |x - b|²)^{-hβ} dx with a, b on the e1 axis,
/// over |x1| <= H, |x'| <= H.
double axisymmetric_product(int n, double h, double ea, double eb, double a, double b, double eps, double H) {
    const double e2 = eps * eps;
    auto profile = [&](double x1, double rho2) {
        const double da = x1 - a;
        const double db = x1 - b;
        return std::pow(e2 + da * da + rho2, -h * ea) * std::pow(e2 + db * db + rho2, -h * eb);
    };
    const auto x_breaks = graded_breaks(-H, H, {a, b}, eps);
    if (n == 1) {
        return panel_sum(x_breaks, [&](double x1) { return profile(x1, 0.0); });
    }
    const auto r_breaks = graded_breaks(0.0, H, {0.0}, eps);
    const double omega = transverse_sphere(n);
    return panel_sum(x_breaks, [&](double x1) {
        return omega * panel_sum(r_breaks, [&](double rho) {
                   return std::pow(rho, n - 2) * profile(x1, rho * rho);
               });
    });
}

struct BoxedIntegral {
    double value;
    double tail;
};

BoxedIntegral boxed(const SystemParams& p, double ea, double eb, double R, const QuadratureSpec& q) {
    if (!std::isfinite(q.epsilon) || !(q.epsilon > 0.0)) {
        throw DomainError("epsilon_positive", format_value(q.epsilon), "quadrature ε must be positive");
    }
    if (!std::isfinite(q.shift)) throw DomainError("shift_finite", format_value(q.shift), "shift must be finite");
    const double a = q.shift;
    const double b = q.shift - R;
    const double H = q.box_half_width > 0.0 ? q.box_half_width : std::abs(q.shift) + R + 200.0 * q.epsilon;
    if (!(H > std::max(std::abs(a), std::abs(b)))) {
        throw DomainError("box_contains_centers", format_value(H), "quadrature box must contain both centers");
    }
    const double h = (p.n() - 2.0 * p.s()) / 2.0;
    const double inner = axisymmetric_product(p.n(), h, ea, eb, a, b, q.epsilon, H);
    const double outer = axisymmetric_product(p.n(), h, ea, eb, a, b, q.epsilon, 2.0 * H);
    const double tail = std::abs(outer - inner) / std::abs(outer);
    if (!(tail <= 0.1)) {
        throw NumericalError("quadrature", "box_tail", format_value(tail),
                             "box doubling changes the overlap integral by " + format_value(tail));
    }
    return {outer, tail};
}

void validate_separation(double R) {
    if (!std::isfinite(R) || R < 0.0) throw DomainError("R_nonnegative", format_value(R), "separation must be >= 0");
}

} // namespace

double overlap_integral(const SystemParams& p, double R, const QuadratureSpec& q) {
    validate_separation(R);
    return boxed(p, p.alpha(), p.beta(), R, q).value;
}

OverlapDatum overlap_theta(const SystemParams& p, double R, const QuadratureSpec& q) {
    validate_separation(R);
    const BoxedIntegral overlap = boxed(p, p.alpha(), p.beta(), R, q);
    const BoxedIntegral mass = boxed(p, p.two_star(), 0.0, 0.0, q);
    const double e = p.two_star() - 2.0;
    const double scale = std::pow(p.mu1(), (2.0 - p.alpha()) / e) * std::pow(p.mu2(), -p.beta() / e);
    return {R, scale * overlap.value / mass.value, overlap.value, mass.value, std::max(overlap.tail, mass.tail)};
}

double overlap_theta_second(const SystemParams& p, double theta) {
    return theta * std::pow(p.mu2() / p.mu1(), p.decay_power());
}

// ---------------------------------------------------------------- perturbation

PerturbationConstants perturbation_constants(const SystemParams& p) {
    const double a = p.alpha();
    const double b = p.beta();
    const double e = p.two_star() - 2.0;
    const double g1 = a * p.gamma() / p.two_star();
    const double g2 = b * p.gamma() / p.two_star();
    PerturbationConstants out;
    out.B = {{{-g1 * (a - 2.0) / e, -g1 * b / e}, {-g2 * a / e, -g2 * (b - 2.0) / e}}};
    out.c = {-g1 * 2.0 / e, -g2 * 2.0 / e};
    out.B_norm = std::max(std::abs(out.B[0][0]) + std::abs(out.B[0][1]),
                          std::abs(out.B[1][0]) + std::abs(out.B[1][1]));
    out.c_norm = std::max(std::abs(out.c[0]), std::abs(out.c[1]));
    return out;
}

std::array<double, 2> perturbation_residual(const SystemParams& p, double t, double s, double theta1,
                                            double theta2) {
    const double a = p.alpha();
    const double b = p.beta();
    const double ph = p.p_half();
    const double g1 = a * p.gamma() / p.two_star();
    const double g2 = b * p.gamma() / p.two_star();
    return {std::pow(t, ph) + g1 * std::pow(t, (a - 2.0) / 2.0) * std::pow(s, b / 2.0) * theta1 - 1.0,
            std::pow(s, ph) + g2 * std::pow(t, a / 2.0) * std::pow(s, (b - 2.0) / 2.0) * theta2 - 1.0};
}

PerturbationSolution solve_tR_sR(const SystemParams& p, double theta, double tol) {
    return solve_tR_sR(p, theta, theta, tol);
}

PerturbationSolution solve_tR_sR(const SystemParams& p, double theta1, double theta2, double tol) {
    const PerturbationConstants pc = perturbation_constants(p);
    for (double th : {theta1, theta2}) {
        if (!std::isfinite(th) || th < 0.0) {
            throw DomainError("theta_nonnegative", format_value(th), "θ must be finite and >= 0");
        }
        if (th > 0.1) throw DomainError("theta_small", format_value(th), "θ above 0.1 is outside the contraction regime");
        if (th * pc.B_norm > 0.5) {
            throw DomainError("theta_contraction", format_value(th * pc.B_norm),
                              "θ ||B|| must not exceed 1/2");
        }
    }
    if (!(tol > 0.0)) throw DomainError("tol_positive", format_value(tol), "tolerance must be positive");

    // M = p (I - diag(θ1, θ2) B) is the derivative of the residual at (1, 1).
    const double ph = p.p_half();
    const double m00 = ph * (1.0 - theta1 * pc.B[0][0]);
    const double m01 = -ph * theta1 * pc.B[0][1];
    const double m10 = -ph * theta2 * pc.B[1][0];
    const double m11 = ph * (1.0 - theta2 * pc.B[1][1]);
    const double det = m00 * m11 - m01 * m10;

    double x0 = 0.0, x1 = 0.0;
    for (int it = 1; it <= 200; ++it) {
        const auto g = perturbation_residual(p, 1.0 + x0, 1.0 + x1, theta1, theta2);
        const double defect = std::max(std::abs(g[0]), std::abs(g[1]));
        if (!std::isfinite(defect)) break;
        if (defect <= tol) {
            return {1.0 + x0, 1.0 + x1, it, defect, pc.c_norm, std::max(theta1, theta2)};
        }
        x0 -= (m11 * g[0] - m01 * g[1]) / det;
        x1 -= (-m10 * g[0] + m00 * g[1]) / det;
        if (!(1.0 + x0 > 0.0) || !(1.0 + x1 > 0.0)) break;
    }
    throw NumericalError("divergence", "theta", format_value(std::max(theta1, theta2)),
                         "fixed-point iteration for (tR, sR) did not converge");
}

std::vector<GapRow> energy_gap_vs_R(const SystemParams& p, const std::vector<double>& R_list,
                                    const QuadratureSpec& q) {
    if (!(p.gamma() < 0.0)) {
        throw DomainError("gamma_negative", format_value(p.gamma()), "the separated-bubble bound needs γ < 0");
    }
    const double w1 = std::pow(p.mu1(), -p.decay_power());
    const double w2 = std::pow(p.mu2(), -p.decay_power());
    std::vector<GapRow> rows;
    rows.reserve(R_list.size());
    for (double R : R_list) {
        if (!std::isfinite(R) || !(R > 0.0)) throw DomainError("R_positive", format_value(R), "R must be positive");
        GapRow row;
        row.R = R;
        row.theta1 = overlap_theta(p, R, q).theta;
        row.theta2 = overlap_theta_second(p, row.theta1);
        const PerturbationSolution sol = solve_tR_sR(p, row.theta1, row.theta2, 1e-13);
        row.tR = sol.tR;
        row.sR = sol.sR;
        row.iterations = sol.iterations;
        row.bound = sol.tR * w1 + sol.sR * w2;
        row.limit = w1 + w2;
        row.rel_gap = (row.bound - row.limit) / row.limit;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------- continuation

double condition_number(const Mat2& J) {
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (det == 0.0 || !std::isfinite(det)) return std::numeric_limits<double>::infinity();
    const double norm = std::max(std::abs(J[0][0]) + std::abs(J[0][1]), std::abs(J[1][0]) + std::abs(J[1][1]));
    const double inv_norm = std::max(std::abs(J[1][1]) + std::abs(J[0][1]), std::abs(J[1][0]) + std::abs(J[0][0])) /
                            std::abs(det);
    return norm * inv_norm;
}

namespace {

std::array<double, 2> solve2(const Mat2& J, const std::array<double, 2>& r) {
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    return {(J[1][1] * r[0] - J[0][1] * r[1]) / det, (-J[1][0] * r[0] + J[0][0] * r[1]) / det};
}

constexpr double kFoldCondition = 1e12;

enum class Corrector { converged, failed, fold };

Corrector newton(const SystemParams& p, double& k, double& l, double tol) {
    for (int it = 0; it < 30; ++it) {
        if (!(k > 0.0) || !(l > 0.0)) return Corrector::failed;
        const std::array<double, 2> F{eval_F1(p, k, l), eval_F2(p, k, l)};
        if (!std::isfinite(F[0]) || !std::isfinite(F[1])) return Corrector::failed;
        const Mat2 J = coupling_jacobian(p, k, l);
        if (condition_number(J) > kFoldCondition) return Corrector::fold;
        if (std::max(std::abs(F[0]), std::abs(F[1])) <= tol) return Corrector::converged;
        const auto d = solve2(J, F);
        k -= d[0];
        l -= d[1];
    }
    return Corrector::failed;
}

} // namespace

ContinuationPath continuation_branch(const SystemParams& base, double gamma_max, double step, double tol) {
    if (!(base.alpha() < 2.0) || !(base.beta() < 2.0)) {
        throw DomainError("alpha_beta_below_2", format_value(std::max(base.alpha(), base.beta())),
                          "continuation requires 1 < α, β < 2");
    }
    if (!std::isfinite(gamma_max) || !(gamma_max > 0.0)) {
        throw DomainError("gamma_max_positive", format_value(gamma_max), "gamma_max must be positive");
    }
    if (!std::isfinite(step)) throw DomainError("step_finite", format_value(step), "step must be finite");
    if (!(tol > 0.0)) throw DomainError("tol_positive", format_value(tol), "tolerance must be positive");

    ContinuationPath path;
    path.initial_step = step > 0.0 ? step : gamma_threshold_b(base) / 100.0;

    auto record = [&](double gamma, double k, double l) {
        const SystemParams pg = base.with_gamma(gamma);
        ContinuationSample smp;
        smp.gamma = gamma;
        smp.k = k;
        smp.l = l;
        smp.res1 = std::abs(eval_F1(pg, k, l));
        smp.res2 = std::abs(eval_F2(pg, k, l));
        smp.jac_cond = condition_number(coupling_jacobian(pg, k, l));
        smp.ordering_ok = energy_ordering_check(pg, k, l);
        path.samples.push_back(smp);
    };

    double gamma = 0.0;
    double k = base.k_end();
    double l = base.l_end();
    record(gamma, k, l);

    const double h_min = 1e-14 * std::max(1.0, gamma_max);
    double h = path.initial_step;
    while (gamma < gamma_max) {
        const bool last = h >= gamma_max - gamma;
        const double gamma_next = last ? gamma_max : gamma + h;
        const double dg = gamma_next - gamma;

        const SystemParams pg = base.with_gamma(gamma);
        const auto tangent = solve2(coupling_jacobian(pg, k, l), coupling_gamma_derivative(pg, k, l));
        double kn = k - dg * tangent[0];
        double ln = l - dg * tangent[1];

        const Corrector status = newton(base.with_gamma(gamma_next), kn, ln, tol);
        if (status == Corrector::fold) {
            path.fold_detected = true;
            break;
        }
        if (status == Corrector::failed) {
            h = 0.5 * dg;
            // A quadratic turning point keeps cond(J) ~ (γ* - γ)^{-1/2}, far below the
            // fold threshold at any representable step; the step collapse is the signal.
            if (h < h_min) {
                path.fold_detected = true;
                break;
            }
            continue;
        }
        gamma = gamma_next;
        k = kn;
        l = ln;
        record(gamma, k, l);
        h = std::min(2.0 * dg, path.initial_step);
    }

    for (std::size_t i = 1; i < path.samples.size(); ++i) {
        if (path.samples[i].ordering_ok != path.samples[i - 1].ordering_ok) {
            path.gamma1_bracket = std::make_pair(path.samples[i - 1].gamma, path.samples[i].gamma);
            break;
        }
    }
    return path;
}

} // namespace critsys
