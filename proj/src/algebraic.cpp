#include "critsys/algebraic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "critsys/errors.hpp"
#include "critsys/regime.hpp"

namespace critsys {

double pos_pow(double x, double e) {
    if (x > 0.0) return std::pow(x, e);
    if (x == 0.0) {
        if (e > 0.0) return 0.0;
        if (e == 0.0) return 1.0;
        throw DomainError("base_positive", format_value(x),
                          "zero raised to a negative power");
    }
    throw DomainError("base_nonnegative", format_value(x), "negative base");
}

double eval_F1(const SystemParams& p, double k, double l) {
    if (!(k >= 0.0) || !(l >= 0.0)) {
        throw DomainError("kl_nonnegative", format_value(std::min(k, l)), "F1 requires k, l >= 0");
    }
    if (k == 0.0 && p.alpha() < 2.0) {
        throw DomainError("k_positive", format_value(k),
                          "F1 is singular at k = 0 for alpha < 2; use the curve forms");
    }
    const double a = p.alpha();
    const double b = p.beta();
    const double coupling = a * p.gamma() / p.two_star();
    double cross = 0.0;
    if (coupling != 0.0) cross = coupling * pos_pow(k, (a - 2.0) / 2.0) * pos_pow(l, b / 2.0);
    return p.mu1() * pos_pow(k, p.p_half()) + cross - 1.0;
}

double eval_F2(const SystemParams& p, double k, double l) {
    if (!(k >= 0.0) || !(l >= 0.0)) {
        throw DomainError("kl_nonnegative", format_value(std::min(k, l)), "F2 requires k, l >= 0");
    }
    if (l == 0.0 && p.beta() < 2.0) {
        throw DomainError("l_positive", format_value(l),
                          "F2 is singular at l = 0 for beta < 2; use the curve forms");
    }
    const double a = p.alpha();
    const double b = p.beta();
    const double coupling = b * p.gamma() / p.two_star();
    double cross = 0.0;
    if (coupling != 0.0) cross = coupling * pos_pow(k, a / 2.0) * pos_pow(l, (b - 2.0) / 2.0);
    return p.mu2() * pos_pow(l, p.p_half()) + cross - 1.0;
}

Mat2 coupling_jacobian(const SystemParams& p, double k, double l) {
    if (!(k > 0.0) || !(l > 0.0)) {
        throw DomainError("kl_positive", format_value(std::min(k, l)), "Jacobian requires k, l > 0");
    }
    const double a = p.alpha();
    const double b = p.beta();
    const double ph = p.p_half();
    const double c1 = a * p.gamma() / p.two_star();
    const double c2 = b * p.gamma() / p.two_star();
    Mat2 j{};
    j[0][0] = p.mu1() * ph * std::pow(k, ph - 1.0) +
              c1 * (a - 2.0) / 2.0 * std::pow(k, (a - 4.0) / 2.0) * std::pow(l, b / 2.0);
    j[0][1] = c1 * b / 2.0 * std::pow(k, (a - 2.0) / 2.0) * std::pow(l, (b - 2.0) / 2.0);
    j[1][0] = c2 * a / 2.0 * std::pow(k, (a - 2.0) / 2.0) * std::pow(l, (b - 2.0) / 2.0);
    j[1][1] = p.mu2() * ph * std::pow(l, ph - 1.0) +
              c2 * (b - 2.0) / 2.0 * std::pow(k, a / 2.0) * std::pow(l, (b - 4.0) / 2.0);
    return j;
}

std::array<double, 2> coupling_gamma_derivative(const SystemParams& p, double k, double l) {
    const double a = p.alpha();
    const double b = p.beta();
    return {a / p.two_star() * pos_pow(k, (a - 2.0) / 2.0) * pos_pow(l, b / 2.0),
            b / p.two_star() * pos_pow(k, a / 2.0) * pos_pow(l, (b - 2.0) / 2.0)};
}

namespace {

void require_positive_gamma(const SystemParams& p) {
    if (!(p.gamma() > 0.0)) {
        throw DomainError("gamma_positive", format_value(p.gamma()), "curve forms require gamma > 0");
    }
}

// Shared body of l(k) and k(l): the branch of
//   mu x^{ph} + (e γ/2*) x^{(e-2)/2} y^{o/2} = 1
// solved for y, where e is the exponent attached to x and o the other one.
double curve_branch(const SystemParams& p, double x, double x_end, double mu, double e, double o,
                    const char* name) {
    require_positive_gamma(p);
    if (!(x > 0.0) || !(x <= x_end)) {
        throw DomainError(name, format_value(x), std::string(name) + " outside (0, mu^{-2/(2*-2)}]");
    }
    const double w = std::max(0.0, 1.0 - mu * std::pow(x, p.p_half()));
    const double scale = p.two_star() / (e * p.gamma());
    return std::pow(scale, 2.0 / o) * std::pow(x, (2.0 - e) / o) * pos_pow(w, 2.0 / o);
}

double curve_branch_prime(const SystemParams& p, double x, double x_end, double mu, double e,
                          double o, const char* name) {
    require_positive_gamma(p);
    if (!(x > 0.0) || !(x < x_end)) {
        throw DomainError(name, format_value(x), std::string(name) + " outside the open curve domain");
    }
    const double ph = p.p_half();
    const double w = 1.0 - mu * std::pow(x, ph);
    if (!(w > 0.0)) {
        throw DomainError(name, format_value(x), "curve derivative undefined at the endpoint");
    }
    const double y = curve_branch(p, x, x_end, mu, e, o, name);
    const double log_slope = (2.0 - e) / (o * x) - (2.0 / o) * mu * ph * std::pow(x, ph - 1.0) / w;
    return y * log_slope;
}

} // namespace

double curve_l_of_k(const SystemParams& p, double k) {
    return curve_branch(p, k, p.k_end(), p.mu1(), p.alpha(), p.beta(), "k");
}

double curve_k_of_l(const SystemParams& p, double l) {
    return curve_branch(p, l, p.l_end(), p.mu2(), p.beta(), p.alpha(), "l");
}

double curve_l_prime(const SystemParams& p, double k) {
    return curve_branch_prime(p, k, p.k_end(), p.mu1(), p.alpha(), p.beta(), "k");
}

double curve_k_prime(const SystemParams& p, double l) {
    return curve_branch_prime(p, l, p.l_end(), p.mu2(), p.beta(), p.alpha(), "l");
}

FValue eval_f(const SystemParams& p, double k) {
    require_positive_gamma(p);
    if (!(k > 0.0) || !(k <= p.k_end())) {
        throw DomainError("k", format_value(k), "f(k) requires 0 < k <= mu1^{-2/(2*-2)}");
    }
    const double a = p.alpha();
    const double b = p.beta();
    const double ph = p.p_half();
    const double scale = p.two_star() / (a * p.gamma());
    const double w = std::max(0.0, 1.0 - p.mu1() * std::pow(k, ph));

    const double first = p.mu2() * std::pow(scale, a / b) * pos_pow(w, a / b);
    const double second = b * p.gamma() / p.two_star() * std::pow(k, ph * a / b);
    // w^{(2-β)/β} blows up at the endpoint when β > 2; treat that as -inf.
    double third;
    if (w == 0.0 && b > 2.0) {
        third = std::numeric_limits<double>::infinity();
    } else {
        third = std::pow(scale, (2.0 - b) / b) * std::pow(k, -ph * (2.0 - a) / b) *
                pos_pow(w, (2.0 - b) / b);
    }

    FValue out;
    out.value = first + second - third;
    if (!std::isfinite(out.value) || std::abs(out.value) > kFSentinel) {
        out.value = (std::isinf(third) || out.value < 0.0) ? -kFSentinel : kFSentinel;
        out.clamped = true;
    }
    return out;
}

namespace {

// A few Newton steps on (F1, F2); only improving steps that keep k, l > 0
// are accepted.
void newton_polish(const SystemParams& p, double& k, double& l, int steps = 4) {
    double best = std::max(std::abs(eval_F1(p, k, l)), std::abs(eval_F2(p, k, l)));
    for (int it = 0; it < steps && best > 0.0; ++it) {
        const Mat2 j = coupling_jacobian(p, k, l);
        const double f1 = eval_F1(p, k, l);
        const double f2 = eval_F2(p, k, l);
        const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if (det == 0.0 || !std::isfinite(det)) return;
        const double dk = (f1 * j[1][1] - f2 * j[0][1]) / det;
        const double dl = (f2 * j[0][0] - f1 * j[1][0]) / det;
        const double nk = k - dk;
        const double nl = l - dl;
        if (!(nk > 0.0) || !(nl > 0.0)) return;
        const double r = std::max(std::abs(eval_F1(p, nk, nl)), std::abs(eval_F2(p, nk, nl)));
        if (!(r < best)) return;
        k = nk;
        l = nl;
        best = r;
    }
}

CouplingSolution finish(const SystemParams& p, double k, double l, double tol, const char* method) {
    newton_polish(p, k, l);
    CouplingSolution sol{k, l, std::abs(eval_F1(p, k, l)), std::abs(eval_F2(p, k, l))};
    if (!(sol.res1 <= tol) || !(sol.res2 <= tol)) {
        throw NumericalError("residual", method, format_value(std::max(sol.res1, sol.res2)),
                             std::string(method) + ": residual above tolerance " + format_value(tol));
    }
    return sol;
}

template <class F>
double bisect(F&& sign_fn, double lo, double hi, int sign_lo) {
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const int sm = sign_fn(mid);
        if (sm == 0) return mid;
        if (sm == sign_lo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace

CouplingSolution find_k0_l0(const SystemParams& p, double tol) {
    if (p.gamma() < 0.0) {
        throw DomainError("gamma_nonnegative", format_value(p.gamma()),
                          "root finding is not defined for gamma < 0");
    }
    if (p.gamma() == 0.0) {
        const double k = p.k_end();
        const double l = p.l_end();
        return {k, l, std::abs(eval_F1(p, k, l)), std::abs(eval_F2(p, k, l))};
    }
    if (!in_case_a(p) && !in_case_b(p)) {
        throw DomainError("regime_hypotheses", format_value(p.alpha()),
                          "find_k0_l0 requires n > 4s with 1 < alpha, beta < 2 or "
                          "2s < n < 4s with alpha, beta > 2");
    }

    constexpr int kGrid = 512;
    const double k_end = p.k_end();
    const double lo_frac = 1e-8;
    const double hi_frac = 1.0 - 1e-12;
    std::vector<double> ks(kGrid);
    std::vector<int> signs(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        const double t = static_cast<double>(i) / (kGrid - 1);
        ks[i] = k_end * lo_frac * std::pow(hi_frac / lo_frac, t);
        signs[i] = sign_of(eval_f(p, ks[i]).value);
    }

    auto f_sign = [&](double k) { return sign_of(eval_f(p, k).value); };
    for (int i = 0; i < kGrid; ++i) {
        if (signs[i] == 0) return finish(p, ks[i], curve_l_of_k(p, ks[i]), tol, "bisection");
        if (i + 1 < kGrid && signs[i + 1] != signs[i]) {
            const double k = bisect(f_sign, ks[i], ks[i + 1], signs[i]);
            return finish(p, k, curve_l_of_k(p, k), tol, "bisection");
        }
    }
    throw NumericalError("no_sign_change", "bracket", format_value(p.gamma()),
                         "f(k) has no sign change on the scan grid");
}

double ratio_f1(const SystemParams& p, double x) {
    if (!(x > 0.0)) throw DomainError("x_positive", format_value(x), "ratio requires x > 0");
    const double ph = p.p_half();
    const double den = p.mu1() * std::pow(x, ph) +
                       p.alpha() * p.gamma() / p.two_star() * std::pow(x, (p.alpha() - 2.0) / 2.0);
    return std::pow(x + 1.0, ph) / den;
}

double ratio_f2(const SystemParams& p, double x) {
    if (!(x > 0.0)) throw DomainError("x_positive", format_value(x), "ratio requires x > 0");
    const double ph = p.p_half();
    const double den = p.mu2() + p.beta() * p.gamma() / p.two_star() * std::pow(x, p.alpha() / 2.0);
    return std::pow(x + 1.0, ph) / den;
}

RatioReduction solve_ratio_reduction(const SystemParams& p, double tol) {
    if (!in_case_a(p)) {
        throw DomainError("case_a", format_value(p.alpha()),
                          "ratio reduction requires 2s < n < 4s and alpha, beta > 2");
    }
    if (!(p.gamma() > 0.0)) {
        throw DomainError("gamma_positive", format_value(p.gamma()),
                          "ratio reduction requires gamma > 0");
    }

    auto gap = [&](double x) { return std::log(ratio_f1(p, x)) - std::log(ratio_f2(p, x)); };
    double lo = 1.0;
    double hi = 1.0;
    for (int i = 0; gap(lo) <= 0.0; ++i) {
        if (i > 2000) throw NumericalError("no_sign_change", "ratio_bracket", format_value(lo), "no lower bracket");
        lo *= 0.5;
    }
    for (int i = 0; gap(hi) >= 0.0; ++i) {
        if (i > 2000) throw NumericalError("no_sign_change", "ratio_bracket", format_value(hi), "no upper bracket");
        hi *= 2.0;
    }
    auto gap_sign_log = [&](double t) { return sign_of(gap(std::exp(t))); };
    const double x0 = std::exp(bisect(gap_sign_log, std::log(lo), std::log(hi), 1));

    // Sample f1, f2 on a log grid that covers x0 and the critical points of
    // the numerators of f1' and f2'.
    const double a = p.alpha();
    const double b = p.beta();
    const double ts = p.two_star();
    const double x1 = std::pow(2.0 * a * p.gamma() / (ts * (ts - 2.0) * p.mu1()), 2.0 / (b - 2.0));
    const double x2 = (a - 2.0) / (b - 2.0);
    const double x_min = std::min({x0, x1, x2}) * 1e-3;
    const double x_max = std::max({x0, x1, x2}) * 1e3;
    constexpr int kSamples = 1000;
    double prev1 = 0.0, prev2 = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double x = x_min * std::pow(x_max / x_min, static_cast<double>(i) / (kSamples - 1));
        const double v1 = ratio_f1(p, x);
        const double v2 = ratio_f2(p, x);
        if (i > 0) {
            if (v1 > prev1 * (1.0 + 1e-13)) {
                throw NumericalError("monotonicity_violation", "f1_decreasing", format_value(x),
                                     "f1 is not decreasing: threshold A appears violated");
            }
            if (v2 < prev2 * (1.0 - 1e-13)) {
                throw NumericalError("monotonicity_violation", "f2_increasing", format_value(x),
                                     "f2 is not increasing: threshold A appears violated");
            }
        }
        prev1 = v1;
        prev2 = v2;
    }

    RatioReduction out;
    out.x0 = x0;
    out.y0 = std::pow(ratio_f1(p, x0), 1.0 / p.p_half());
    out.solution = finish(p, x0 * out.y0 / (1.0 + x0), out.y0 / (1.0 + x0), tol, "ratio");
    return out;
}

double lprime_min_closed_form(const SystemParams& p) {
    const double ts = p.two_star();
    const double a = p.alpha();
    const double b = p.beta();
    return -std::pow(ts * (ts - 2.0) * p.mu1() / (2.0 * a * p.gamma()), 2.0 / b) *
           std::pow((2.0 - b) / (2.0 - a), (2.0 - b) / b);
}

double kprime_min_closed_form(const SystemParams& p) {
    return lprime_min_closed_form(p.swapped());
}

namespace {

template <class Curve>
double central_grid_min(Curve&& curve, double x_end, std::size_t points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points; ++i) {
        const double x = x_end * (static_cast<double>(i) + 0.5) / static_cast<double>(points);
        const double h = std::min(1e-6 * x, 1e-3 * (x_end - x));
        const double d = (curve(x + h) - curve(x - h)) / (2.0 * h);
        best = std::min(best, d);
    }
    return best;
}

void require_curve_case(const SystemParams& p) {
    if (!(p.two_star() < 4.0)) {
        throw DomainError("two_star_lt_4", format_value(p.two_star()),
                          "curve diagnostics require 2* < 4 (n > 4s)");
    }
    if (!(p.alpha() < 2.0) || !(p.beta() < 2.0)) {
        throw DomainError("alpha_beta_lt_2", format_value(std::max(p.alpha(), p.beta())),
                          "curve diagnostics require 1 < alpha, beta < 2");
    }
    require_positive_gamma(p);
}

} // namespace

double lprime_grid_min(const SystemParams& p, std::size_t points) {
    require_positive_gamma(p);
    return central_grid_min([&](double k) { return curve_l_of_k(p, k); }, p.k_end(), points);
}

double kprime_grid_min(const SystemParams& p, std::size_t points) {
    require_positive_gamma(p);
    return central_grid_min([&](double l) { return curve_k_of_l(p, l); }, p.l_end(), points);
}

CurveDiagnostics curve_diagnostics(const SystemParams& p) {
    require_curve_case(p);
    const double ts = p.two_star();
    const double a = p.alpha();
    const double b = p.beta();
    const double inv_ph = 1.0 / p.p_half();

    CurveDiagnostics d;
    d.k_star_l = std::pow((2.0 - a) / (p.mu1() * b), inv_ph);
    d.k_infl = std::pow(2.0 * (2.0 - a) / (p.mu1() * b * (4.0 - ts)), inv_ph);
    d.lprime_min = lprime_min_closed_form(p);
    d.lprime_min_grid = lprime_grid_min(p);
    d.l_star_k = std::pow((2.0 - b) / (p.mu2() * a), inv_ph);
    d.l_infl = std::pow(2.0 * (2.0 - b) / (p.mu2() * a * (4.0 - ts)), inv_ph);
    d.kprime_min = kprime_min_closed_form(p);
    d.kprime_min_grid = kprime_grid_min(p);

    auto rel = [](double x, double y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); };
    if (rel(d.lprime_min_grid, d.lprime_min) > 1e-6 || rel(d.kprime_min_grid, d.kprime_min) > 1e-6) {
        throw NumericalError("closed_form_mismatch", "lprime_min", format_value(d.lprime_min_grid),
                             "grid slope minimum disagrees with the closed form");
    }
    return d;
}

double domination_margin(const SystemParams& p, const CouplingSolution& sol, double c, double d) {
    constexpr double kFeasTol = 1e-12;
    if (eval_F1(p, c, d) >= -kFeasTol && eval_F2(p, c, d) >= -kFeasTol) {
        return (c + d) - (sol.k + sol.l);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

DominationReport check_domination(const SystemParams& p, const CouplingSolution& sol,
                                  std::size_t samples, std::uint64_t seed) {
    const Regime regime = classify(p);
    if (regime.label != RegimeLabel::attained_a && regime.label != RegimeLabel::attained_b) {
        throw DomainError("regime", std::string(to_string(regime.label)),
                          "domination check requires an attained regime", "regime_mismatch");
    }
    const double c_lo = sol.k / 10.0;
    const double c_hi = 10.0 * std::max(sol.k, p.k_end());
    const double d_lo = sol.l / 10.0;
    const double d_hi = 10.0 * std::max(sol.l, p.l_end());

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uc(std::log(c_lo), std::log(c_hi));
    std::uniform_real_distribution<double> ud(std::log(d_lo), std::log(d_hi));

    DominationReport report;
    report.samples = samples;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
        const double c = std::exp(uc(rng));
        const double d = std::exp(ud(rng));
        const double margin = domination_margin(p, sol, c, d);
        if (std::isnan(margin)) continue;
        ++report.feasible;
        if (margin < report.worst_margin) {
            report.worst_margin = margin;
            report.worst_c = c;
            report.worst_d = d;
        }
        if (margin < -1e-9) {
            ++report.violations;
            throw CounterexampleError(c, d, margin,
                                      "feasible pair with c + d < k0 + l0: " + format_value(margin));
        }
    }
    return report;
}

} // namespace critsys
