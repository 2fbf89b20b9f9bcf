#include "critsys/params.hpp"

#include <cmath>
#include <cstdio>

#include "critsys/errors.hpp"

namespace critsys {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CounterexampleError::pair_string(double c, double d) {
    return "(" + format_value(c) + ", " + format_value(d) + ")";
}

void validate_dimension(int n, double s) {
    if (n < 1) {
        throw DomainError("n_positive", std::to_string(n), "n must be a positive integer");
    }
    if (!std::isfinite(s) || !(s > 0.0 && s < 1.0)) {
        throw DomainError("s_range", format_value(s), "s out of range: require 0 < s < 1");
    }
    if (!(n > 2.0 * s)) {
        throw DomainError("n_gt_2s", std::to_string(n), "require n > 2s");
    }
}

double critical_exponent(int n, double s) {
    validate_dimension(n, s);
    return 2.0 * n / (n - 2.0 * s);
}

double critical_exponent(const SystemParams& params) {
    return params.two_star();
}

SystemParams make_params(int n, double s, double alpha, double mu1, double mu2, double gamma) {
    validate_dimension(n, s);
    const double two_star = 2.0 * n / (n - 2.0 * s);
    if (!std::isfinite(alpha) || !(alpha > 1.0 && alpha < two_star - 1.0)) {
        throw DomainError("alpha_range", format_value(alpha),
                          "alpha out of range: require 1 < alpha < 2* - 1 = " +
                              format_value(two_star - 1.0));
    }
    if (!std::isfinite(mu1) || !(mu1 > 0.0)) {
        throw DomainError("mu1_positive", format_value(mu1), "require mu1 > 0");
    }
    if (!std::isfinite(mu2) || !(mu2 > 0.0)) {
        throw DomainError("mu2_positive", format_value(mu2), "require mu2 > 0");
    }
    if (!std::isfinite(gamma)) {
        throw DomainError("gamma_finite", format_value(gamma), "gamma must be finite");
    }

    SystemParams p;
    p.n_ = n;
    p.s_ = s;
    p.alpha_ = alpha;
    p.beta_ = two_star - alpha;
    p.mu1_ = mu1;
    p.mu2_ = mu2;
    p.gamma_ = gamma;
    p.exps_.two_star = two_star;
    p.exps_.p_half = (2.0 * s) / (n - 2.0 * s);
    p.exps_.decay_power = (n - 2.0 * s) / (2.0 * s);
    return p;
}

SystemParams SystemParams::with_gamma(double gamma) const {
    if (!std::isfinite(gamma)) {
        throw DomainError("gamma_finite", format_value(gamma), "gamma must be finite");
    }
    SystemParams p = *this;
    p.gamma_ = gamma;
    return p;
}

SystemParams SystemParams::swapped() const {
    SystemParams p = *this;
    p.alpha_ = beta_;
    p.beta_ = alpha_;
    p.mu1_ = mu2_;
    p.mu2_ = mu1_;
    return p;
}

double SystemParams::single_level(double mu) const {
    return std::pow(mu, -exps_.decay_power);
}

} // namespace critsys
