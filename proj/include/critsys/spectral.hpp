#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "critsys/grid_field.hpp"
#include "critsys/params.hpp"

namespace critsys {

/// (-Δ)^s on the torus via the Fourier multiplier |ξ|^{2s}, with
/// ξ_j = (π/L) m_j and m_j in [-N/2, N/2). The zero mode maps to zero.
/// Accepts 0 < s <= 1; s = 1 is the ordinary -Δ.
GridField frac_laplacian(const GridField& field, double s);

/// Discrete seminorm (h^n / N^n) Σ_ξ |ξ|^{2s} |û_ξ|^2.
double frac_seminorm_sq(const GridField& field, double s);

struct ResidualReport {
    double rel_l2_core = 0;   ///< relative L2 residual over |x| <= L/8
    double rel_sup_core = 0;  ///< relative sup residual over the same window
    bool truncation_flag = false;
};

/// Residual of (-Δ)^s U = |U|^{2*-2} U for a bubble centred at the origin.
/// Throws NumericalError("resolution") when rel_l2_core > 0.5.
ResidualReport pde_residual_single(const SystemParams& p, const GridField& U);

/// Residuals of both equations of the coupled system for
/// (u, v) = (√k U, √l U), each relative to its own right-hand side.
std::pair<ResidualReport, ResidualReport> pde_residual_system(const SystemParams& p, double k,
                                                              double l, const GridField& U);

struct VerifyConfig {
    double L = 30.0;
    int N = 128;
    double epsilon = 1.0;
    bool check_doubling = true;  ///< recompute on (2L, 2N) to set truncation flags
};

struct VerifyResult {
    double k = 0;
    double l = 0;
    double sobolev = 0;
    ResidualReport single;
    ResidualReport first;
    ResidualReport second;
    GridField bubble;
};

/// Builds the normalized bubble on the configured grid and reports single
/// and system residuals at (k, l). With check_doubling the truncation flags
/// compare against the same computation on [-2L, 2L)^n at equal spacing.
VerifyResult verify_synchronized(const SystemParams& p, double k, double l, const VerifyConfig& cfg);

/// Writes the 32-byte header (magic "CRITSYS1", int32 n, int32 N,
/// float64 L, float64 s, all little-endian) followed by the N^n values as
/// little-endian float64.
void dump_field(const std::string& path, const GridField& field, double s);

struct FieldDump {
    double s = 0;
    GridField field;
};
FieldDump read_field_dump(const std::string& path);

} // namespace critsys
