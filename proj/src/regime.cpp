#include "critsys/regime.hpp"

#include <algorithm>
#include <cmath>

#include "critsys/errors.hpp"

namespace critsys {

std::string_view to_string(RegimeLabel label) {
    switch (label) {
    case RegimeLabel::negative_gamma: return "NEGATIVE_GAMMA";
    case RegimeLabel::attained_a: return "ATTAINED_A";
    case RegimeLabel::attained_b: return "ATTAINED_B";
    case RegimeLabel::small_gamma_candidate: return "SMALL_GAMMA_CANDIDATE";
    case RegimeLabel::uncovered: return "UNCOVERED";
    }
    return "UNCOVERED";
}

namespace {

// 4ns μ / ((n-2s)^2 w), grouped so that exact thresholds stay exact in
// floating point where the inputs allow it.
double scaled_branch(const SystemParams& p, double mu, double weight, double ratio_factor) {
    const double n = p.n();
    const double s = p.s();
    const double gap = n - 2.0 * s;
    return (4.0 * n * s * mu * ratio_factor) / (gap * gap * weight);
}

} // namespace

bool in_case_a(const SystemParams& p) {
    const double n = p.n();
    return n > 2.0 * p.s() && n < 4.0 * p.s() && p.alpha() > 2.0 && p.beta() > 2.0;
}

bool in_case_b(const SystemParams& p) {
    return p.n() > 4.0 * p.s() && p.alpha() > 1.0 && p.alpha() < 2.0 && p.beta() > 1.0 &&
           p.beta() < 2.0;
}

double gamma_threshold_a(const SystemParams& p) {
    const double a = p.alpha();
    const double b = p.beta();
    if (!(a > 2.0) || !(b > 2.0)) {
        throw DomainError("alpha_beta_gt_2", format_value(std::min(a, b)),
                          "threshold A requires alpha > 2 and beta > 2");
    }
    // The second branch comes from min g2 = -2 x2^{(α-2)/2} + ... at x2 = (α-2)/(β-2),
    // which puts the ratio in the denominator.
    const double ratio = (a - 2.0) / (b - 2.0);
    const double first = scaled_branch(p, p.mu1(), a, std::pow(ratio, (b - 2.0) / 2.0));
    const double second = scaled_branch(p, p.mu2(), b, std::pow(1.0 / ratio, (a - 2.0) / 2.0));
    return std::min(first, second);
}

double gamma_threshold_b(const SystemParams& p) {
    const double a = p.alpha();
    const double b = p.beta();
    if (!(a < 2.0) || !(b < 2.0)) {
        throw DomainError("alpha_beta_lt_2", format_value(std::max(a, b)),
                          "threshold B requires alpha < 2 and beta < 2");
    }
    const double first =
        scaled_branch(p, p.mu1(), a, std::pow((2.0 - b) / (2.0 - a), (2.0 - b) / 2.0));
    const double second =
        scaled_branch(p, p.mu2(), b, std::pow((2.0 - a) / (2.0 - b), (2.0 - a) / 2.0));
    return std::max(first, second);
}

// Thresholds carry rounding from n - 2s; a γ within this relative distance
// counts as sitting on the threshold.
constexpr double kThresholdSlack = 1e-12;

Regime classify(const SystemParams& p) {
    Regime r;
    const double g = p.gamma();
    const bool case_a = in_case_a(p);
    const bool case_b = in_case_b(p);
    if (case_a) r.gamma_threshold_a = gamma_threshold_a(p);
    if (case_b) r.gamma_threshold_b = gamma_threshold_b(p);

    if (p.n() == 4.0 * p.s()) {
        r.notes.emplace_back("n = 4s: alpha, beta > 2 is impossible since alpha + beta = 4; strict n < 4s used");
    }

    if (g < 0.0) {
        r.label = RegimeLabel::negative_gamma;
    } else if (g == 0.0) {
        r.label = RegimeLabel::uncovered;
        r.notes.emplace_back("gamma = 0: decoupled system");
    } else if (case_a) {
        r.label = g <= *r.gamma_threshold_a * (1.0 + kThresholdSlack) ? RegimeLabel::attained_a
                                                                      : RegimeLabel::uncovered;
        if (r.label == RegimeLabel::uncovered) r.notes.emplace_back("gamma above threshold A");
    } else if (case_b) {
        r.label = g >= *r.gamma_threshold_b * (1.0 - kThresholdSlack) ? RegimeLabel::attained_b
                                            : RegimeLabel::small_gamma_candidate;
    } else {
        r.label = RegimeLabel::uncovered;
        r.notes.emplace_back("(n, s, alpha, beta) outside both attained cases");
    }
    return r;
}

EnergyReport least_energy(const SystemParams& p, const std::optional<CouplingSolution>& solution,
                          std::optional<double> sobolev_constant) {
    const Regime regime = classify(p);
    EnergyReport report;
    report.label = regime.label;

    switch (regime.label) {
    case RegimeLabel::negative_gamma:
        report.dimensionless_A = p.single_level(p.mu1()) + p.single_level(p.mu2());
        report.attained = false;
        break;
    case RegimeLabel::attained_a:
    case RegimeLabel::attained_b:
        if (!solution) {
            throw DomainError("solution_required", std::string(to_string(regime.label)),
                              "attained regime requires the (k0, l0) solution");
        }
        if (!(solution->k > 0.0) || !(solution->l > 0.0)) {
            throw DomainError("solution_positive", format_value(std::min(solution->k, solution->l)),
                              "solution coefficients must be positive");
        }
        report.dimensionless_A = solution->k + solution->l;
        report.attained = true;
        report.minimizer_coeffs = std::pair{solution->k, solution->l};
        break;
    default:
        throw DomainError("regime", std::string(to_string(regime.label)),
                          "least energy is not established in regime " +
                              std::string(to_string(regime.label)),
                          "regime_mismatch");
    }

    if (sobolev_constant) {
        if (!(*sobolev_constant > 0.0) || !std::isfinite(*sobolev_constant)) {
            throw DomainError("sobolev_positive", format_value(*sobolev_constant),
                              "Sobolev constant must be positive");
        }
        const double n = p.n();
        const double s = p.s();
        report.absolute_A =
            (s / n) * report.dimensionless_A * std::pow(*sobolev_constant, n / (2.0 * s));
    }
    return report;
}

bool energy_ordering_check(const SystemParams& p, double k, double l) {
    if (!(k > 0.0) || !(l > 0.0)) {
        throw DomainError("kl_positive", format_value(std::min(k, l)), "require k, l > 0");
    }
    const double floor = std::min(p.single_level(p.mu1()), p.single_level(p.mu2()));
    return k + l > floor;
}

} // namespace critsys
