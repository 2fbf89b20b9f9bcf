#pragma once

namespace critsys {

/// Exponents derived from (n, s).
struct DerivedExponents {
    double two_star;     ///< critical exponent 2n/(n-2s)
    double p_half;       ///< (2*-2)/2
    double decay_power;  ///< (n-2s)/(2s), equal to 2/(2*-2)
};

/// Parameters of the coupled critical system
///
///   (-Δ)^s u = μ1 |u|^{2*-2} u + (αγ/2*) |u|^{α-2} u |v|^β
///   (-Δ)^s v = μ2 |v|^{2*-2} v + (βγ/2*) |u|^α |v|^{β-2} v
///
/// Only constructible through make_params(); beta is always derived as
/// 2* - alpha so the constraint α + β = 2* holds by construction.
class SystemParams {
public:
    int n() const noexcept { return n_; }
    double s() const noexcept { return s_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double mu1() const noexcept { return mu1_; }
    double mu2() const noexcept { return mu2_; }
    double gamma() const noexcept { return gamma_; }

    double two_star() const noexcept { return exps_.two_star; }
    double p_half() const noexcept { return exps_.p_half; }
    double decay_power() const noexcept { return exps_.decay_power; }
    const DerivedExponents& exponents() const noexcept { return exps_; }

    /// Same system with a different coupling strength.
    SystemParams with_gamma(double gamma) const;

    /// Decoupled single-equation level μ^{-2/(2*-2)} (equals μ^{-(n-2s)/(2s)}).
    double single_level(double mu) const;
    double k_end() const { return single_level(mu1_); }
    double l_end() const { return single_level(mu2_); }

    /// (μ1, α) <-> (μ2, β).
    SystemParams swapped() const;

private:
    friend SystemParams make_params(int, double, double, double, double, double);
    SystemParams() = default;

    int n_ = 0;
    double s_ = 0, alpha_ = 0, beta_ = 0, mu1_ = 0, mu2_ = 0, gamma_ = 0;
    DerivedExponents exps_{};
};

/// Validates and builds a parameter set.
///
/// Requires 0 < s < 1, integer n > 2s, 1 < alpha < 2* - 1, mu1 > 0, mu2 > 0,
/// finite gamma. Throws DomainError naming the violated constraint.
SystemParams make_params(int n, double s, double alpha, double mu1, double mu2, double gamma);

/// 2n/(n-2s).
double critical_exponent(const SystemParams& params);
double critical_exponent(int n, double s);

/// Checks 0 < s < 1 and n > 2s; throws DomainError otherwise.
void validate_dimension(int n, double s);

} // namespace critsys
