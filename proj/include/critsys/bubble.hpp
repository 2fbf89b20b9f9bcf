#pragma once

#include <optional>
#include <span>
#include <vector>

#include "critsys/grid_field.hpp"
#include "critsys/params.hpp"

namespace critsys {

/// κ (ε² + |x - y|²)^{-(n-2s)/2}.
struct BubbleSpec {
    double epsilon = 1.0;
    std::vector<double> center;  ///< empty means the origin
    double kappa = 1.0;
};

double bubble_eval(const BubbleSpec& spec, int n, double s, std::span<const double> x);
double bubble_eval(const BubbleSpec& spec, const SystemParams& p, std::span<const double> x);

enum class SobolevMethod { closed_form, spectral_estimate };

struct SobolevConstant {
    double value = 0;
    SobolevMethod method = SobolevMethod::closed_form;
    double est_error = 0;
};

/// 2^{2s} π^s Γ((n+2s)/2)/Γ((n-2s)/2) (Γ(n/2)/Γ(n))^{2s/n}.
SobolevConstant sobolev_constant_closed_form(int n, double s);
SobolevConstant sobolev_constant_closed_form(const SystemParams& p);

/// Discrete Rayleigh quotient seminorm / (h^n Σ|u|^{2*})^{2/2*}.
double rayleigh_quotient(const GridField& u, double s);

GridField sample_bubble(int n, double s, double L, int N, const BubbleSpec& spec);

/// Rayleigh quotient of a discretized bubble (ε defaults to L/30).
///
/// est_error = |Q(L,N) - Q(2L,2N)| + |Q(L,N) - Q(L,N/2)|: the first term
/// probes truncation at fixed spacing, the second resolution. Throws
/// NumericalError("resolution") if est_error > 10% of the value.
/// Requires n in {1, 2, 3} and N a power of two.
SobolevConstant sobolev_constant_spectral(int n, double s, double L, int N,
                                          std::optional<double> epsilon = std::nullopt);
SobolevConstant sobolev_constant_spectral(const SystemParams& p, double L, int N,
                                          std::optional<double> epsilon = std::nullopt);

/// U = S^{1/(2*-2)} ũ / ||ũ||_{2*}, with the 2*-norm taken by the grid
/// quadrature so that h^n Σ U^{2*} = S^{n/2s}.
GridField normalized_bubble(const SystemParams& p, const BubbleSpec& spec, double sobolev,
                            double L, int N);
GridField normalized_bubble(int n, double s, const BubbleSpec& spec, double sobolev, double L,
                            int N);

/// Validates spectral grid parameters: n in {1,2,3}, N a power of two >= 4, L > 0.
void validate_grid(int n, double L, int N);

} // namespace critsys
