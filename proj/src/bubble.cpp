#include "critsys/bubble.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "critsys/errors.hpp"
#include "critsys/spectral.hpp"

namespace critsys {

namespace {

void validate_spec(const BubbleSpec& spec, int n) {
    if (!std::isfinite(spec.epsilon) || !(spec.epsilon > 0.0)) {
        throw DomainError("epsilon_positive", format_value(spec.epsilon), "bubble scale must be positive");
    }
    if (!std::isfinite(spec.kappa) || spec.kappa == 0.0) {
        throw DomainError("kappa_nonzero", format_value(spec.kappa), "bubble amplitude must be nonzero");
    }
    if (!spec.center.empty() && static_cast<int>(spec.center.size()) != n) {
        throw DomainError("center_dim", std::to_string(spec.center.size()),
                          "bubble center must have n coordinates");
    }
}

} // namespace

double bubble_eval(const BubbleSpec& spec, int n, double s, std::span<const double> x) {
    validate_dimension(n, s);
    validate_spec(spec, n);
    if (static_cast<int>(x.size()) < n) {
        throw DomainError("point_dim", std::to_string(x.size()), "evaluation point needs n coordinates");
    }
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) {
        const double dx = x[d] - (spec.center.empty() ? 0.0 : spec.center[d]);
        r2 += dx * dx;
    }
    return spec.kappa * std::pow(spec.epsilon * spec.epsilon + r2, -(n - 2.0 * s) / 2.0);
}

double bubble_eval(const BubbleSpec& spec, const SystemParams& p, std::span<const double> x) {
    return bubble_eval(spec, p.n(), p.s(), x);
}

SobolevConstant sobolev_constant_closed_form(int n, double s) {
    validate_dimension(n, s);
    const double nd = n;
    const double log_val = 2.0 * s * std::log(2.0) + s * std::log(std::numbers::pi) +
                           std::lgamma((nd + 2.0 * s) / 2.0) - std::lgamma((nd - 2.0 * s) / 2.0) +
                           (2.0 * s / nd) * (std::lgamma(nd / 2.0) - std::lgamma(nd));
    return {std::exp(log_val), SobolevMethod::closed_form, 0.0};
}

SobolevConstant sobolev_constant_closed_form(const SystemParams& p) {
    return sobolev_constant_closed_form(p.n(), p.s());
}

double rayleigh_quotient(const GridField& u, double s) {
    const double ts = critical_exponent(u.dim(), s);
    const double denom = std::pow(u.integral_abs_pow(ts), 2.0 / ts);
    if (!(denom > 0.0)) throw DomainError("field_nonzero", "0", "Rayleigh quotient of the zero field");
    return frac_seminorm_sq(u, s) / denom;
}

void validate_grid(int n, double L, int N) {
    if (n < 1 || n > 3) throw DomainError("grid_dim", std::to_string(n), "spectral grids need n in {1, 2, 3}");
    if (N < 4 || (N & (N - 1)) != 0) {
        throw DomainError("grid_power_of_two", std::to_string(N), "N must be a power of two >= 4");
    }
    if (!std::isfinite(L) || !(L > 0.0)) throw DomainError("grid_half_width", format_value(L), "L must be positive");
}

GridField sample_bubble(int n, double s, double L, int N, const BubbleSpec& spec) {
    validate_grid(n, L, N);
    validate_dimension(n, s);
    validate_spec(spec, n);
    return GridField::sample(n, N, L, [&](const std::array<double, 3>& x) {
        return bubble_eval(spec, n, s, std::span<const double>(x.data(), static_cast<std::size_t>(n)));
    });
}

SobolevConstant sobolev_constant_spectral(int n, double s, double L, int N, std::optional<double> epsilon) {
    validate_grid(n, L, N);
    validate_dimension(n, s);
    const BubbleSpec spec{epsilon.value_or(L / 30.0), {}, 1.0};

    auto quotient = [&](double box, int points) {
        return rayleigh_quotient(sample_bubble(n, s, box, points, spec), s);
    };
    const double q = quotient(L, N);
    const double q_wide = quotient(2.0 * L, 2 * N);
    const double q_coarse = quotient(L, N / 2);
    const double err = std::abs(q - q_wide) + std::abs(q - q_coarse);
    if (err > 0.1 * q) {
        throw NumericalError("resolution", "est_error", format_value(err),
                             "spectral Sobolev estimate unresolved: est_error " + format_value(err) +
                                 " exceeds 10% of " + format_value(q));
    }
    return {q, SobolevMethod::spectral_estimate, err};
}

SobolevConstant sobolev_constant_spectral(const SystemParams& p, double L, int N, std::optional<double> epsilon) {
    return sobolev_constant_spectral(p.n(), p.s(), L, N, epsilon);
}

GridField normalized_bubble(int n, double s, const BubbleSpec& spec, double sobolev, double L, int N) {
    if (!std::isfinite(sobolev) || !(sobolev > 0.0)) {
        throw DomainError("sobolev_positive", format_value(sobolev), "Sobolev constant must be positive");
    }
    GridField u = sample_bubble(n, s, L, N, spec);
    const double ts = critical_exponent(n, s);
    const double norm = std::pow(u.integral_abs_pow(ts), 1.0 / ts);
    // Dividing by the signed norm makes U independent of κ, including its sign.
    const double scale = std::copysign(std::pow(sobolev, 1.0 / (ts - 2.0)) / norm, spec.kappa);
    for (double& v : u.values()) v *= scale;
    return u;
}

GridField normalized_bubble(const SystemParams& p, const BubbleSpec& spec, double sobolev, double L, int N) {
    return normalized_bubble(p.n(), p.s(), spec, sobolev, L, N);
}

} // namespace critsys
