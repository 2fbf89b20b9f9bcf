#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "critsys/algebraic.hpp"
#include "critsys/params.hpp"

namespace critsys {

enum class RegimeLabel {
    negative_gamma,          ///< γ < 0: A = (s/n)(μ1^{-q} + μ2^{-q}) S^{n/2s}, not attained
    attained_a,              ///< 2s < n < 4s, α, β > 2, 0 < γ <= threshold A
    attained_b,              ///< n > 4s, 1 < α, β < 2, γ >= threshold B
    small_gamma_candidate,   ///< n > 4s, 1 < α, β < 2, 0 < γ < threshold B
    uncovered,
};

std::string_view to_string(RegimeLabel label);

struct Regime {
    RegimeLabel label = RegimeLabel::uncovered;
    std::optional<double> gamma_threshold_a;
    std::optional<double> gamma_threshold_b;
    std::vector<std::string> notes;
};

/// (4ns/(n-2s)^2) min{(μ1/α)((α-2)/(β-2))^{(β-2)/2}, (μ2/β)((β-2)/(α-2))^{(α-2)/2}}.
/// Invariant under the swap (μ1, α) <-> (μ2, β).
/// Requires α, β > 2.
double gamma_threshold_a(const SystemParams& p);

/// (4ns/(n-2s)^2) max{(μ1/α)((2-β)/(2-α))^{(2-β)/2}, (μ2/β)((2-α)/(2-β))^{(2-α)/2}}.
/// Requires 1 < α, β < 2.
double gamma_threshold_b(const SystemParams& p);

/// Structural hypotheses of the two attained cases, independent of γ.
bool in_case_a(const SystemParams& p);
bool in_case_b(const SystemParams& p);

Regime classify(const SystemParams& p);

struct EnergyReport {
    double dimensionless_A = 0;   ///< A / ((s/n) S^{n/2s})
    std::optional<double> absolute_A;
    bool attained = false;
    std::optional<std::pair<double, double>> minimizer_coeffs;
    RegimeLabel label = RegimeLabel::uncovered;
};

/// Least energy level in the regimes where it is established.
/// NEGATIVE_GAMMA needs no solution; ATTAINED_A/B need the (k0, l0) pair.
/// Other regimes throw DomainError with code "regime_mismatch".
EnergyReport least_energy(const SystemParams& p, const std::optional<CouplingSolution>& solution,
                          std::optional<double> sobolev_constant = std::nullopt);

/// k + l > min{μ1^{-(n-2s)/2s}, μ2^{-(n-2s)/2s}}: the synchronized pair has
/// energy strictly above the smaller single-mode level.
bool energy_ordering_check(const SystemParams& p, double k, double l);

} // namespace critsys
