#include "critsys/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <tuple>
#include <vector>

#include "critsys/bubble.hpp"
#include "critsys/errors.hpp"

namespace critsys {

// ---------------------------------------------------------------- transforms

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

struct PlanDestroy {
    void operator()(fftw_plan_s* p) const noexcept {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDestroy>;

/// Per-call r2c/c2r workspace for an n-dimensional N^n grid.
class Spectrum {
public:
    Spectrum(int n, int N) : n_(n), N_(N) {
        half_ = 1;
        for (int d = 0; d + 1 < n; ++d) half_ *= static_cast<std::size_t>(N);
        half_ *= static_cast<std::size_t>(N / 2 + 1);
        data_.reset(fftw_alloc_complex(half_));
        if (!data_) throw std::bad_alloc();
        for (int d = 0; d < n; ++d) dims_[d] = N;
    }

    void forward(std::span<const double> in) {
        // FFTW_ESTIMATE does not touch the arrays while planning, and an
        // out-of-place r2c transform leaves its input intact.
        auto* src = const_cast<double*>(in.data());
        Plan plan;
        {
            std::lock_guard lock(planner_mutex());
            plan.reset(fftw_plan_dft_r2c(n_, dims_, src, data_.get(), FFTW_ESTIMATE));
        }
        fftw_execute(plan.get());
    }

    void backward(std::span<double> out) {
        Plan plan;
        {
            std::lock_guard lock(planner_mutex());
            plan.reset(fftw_plan_dft_c2r(n_, dims_, data_.get(), out.data(), FFTW_ESTIMATE));
        }
        fftw_execute(plan.get());
        const double scale = 1.0 / static_cast<double>(out.size());
        for (double& v : out) v *= scale;
    }

    /// Calls fn(flat_half_index, squared integer wavenumber, multiplicity).
    template <class Fn>
    void for_each_mode(Fn&& fn) const {
        const std::size_t last = static_cast<std::size_t>(N_ / 2 + 1);
        for (std::size_t i = 0; i < half_; ++i) {
            std::size_t rem = i;
            const std::size_t j_last = rem % last;
            rem /= last;
            double m2 = static_cast<double>(j_last * j_last);
            for (int d = 0; d + 1 < n_; ++d) {
                const long j = static_cast<long>(rem % N_);
                rem /= N_;
                const long m = j < N_ / 2 ? j : j - N_;
                m2 += static_cast<double>(m * m);
            }
            const bool self_conjugate = j_last == 0 || (N_ % 2 == 0 && j_last == last - 1);
            fn(i, m2, self_conjugate ? 1.0 : 2.0);
        }
    }

    fftw_complex* data() noexcept { return data_.get(); }

private:
    int n_;
    int N_;
    int dims_[3] = {0, 0, 0};
    std::size_t half_ = 0;
    std::unique_ptr<fftw_complex, FftwFree> data_;
};

void validate_order(double s) {
    if (!std::isfinite(s) || !(s > 0.0 && s <= 1.0)) {
        throw DomainError("s_range", format_value(s), "operator order requires 0 < s <= 1");
    }
}

} // namespace

GridField frac_laplacian(const GridField& field, double s) {
    validate_order(s);
    const int n = field.dim();
    const int N = field.points_per_axis();
    const double k0 = std::numbers::pi / field.half_width();

    Spectrum spec(n, N);
    spec.forward(field.values());
    fftw_complex* c = spec.data();
    spec.for_each_mode([&](std::size_t i, double m2, double) {
        const double mult = m2 == 0.0 ? 0.0 : std::pow(k0 * k0 * m2, s);
        c[i][0] *= mult;
        c[i][1] *= mult;
    });

    GridField out(n, N, field.half_width());
    spec.backward(out.values());
    return out;
}

double frac_seminorm_sq(const GridField& field, double s) {
    validate_order(s);
    const int n = field.dim();
    const int N = field.points_per_axis();
    const double k0 = std::numbers::pi / field.half_width();

    Spectrum spec(n, N);
    spec.forward(field.values());
    const fftw_complex* c = spec.data();
    double acc = 0.0;
    spec.for_each_mode([&](std::size_t i, double m2, double weight) {
        if (m2 == 0.0) return;
        acc += weight * std::pow(k0 * k0 * m2, s) * (c[i][0] * c[i][0] + c[i][1] * c[i][1]);
    });
    return acc * field.cell_volume() / static_cast<double>(field.size());
}

// ---------------------------------------------------------------- residuals

namespace {

// Accumulates ||residual|| / ||rhs|| over the core window |x| <= L/8.
struct CoreAccumulator {
    double r2 = 0, f2 = 0, rsup = 0, fsup = 0;

    void add(double residual, double rhs) {
        r2 += residual * residual;
        f2 += rhs * rhs;
        rsup = std::max(rsup, std::abs(residual));
        fsup = std::max(fsup, std::abs(rhs));
    }

    ResidualReport report() const {
        ResidualReport r;
        r.rel_l2_core = f2 > 0.0 ? std::sqrt(r2 / f2) : std::sqrt(r2);
        r.rel_sup_core = fsup > 0.0 ? rsup / fsup : rsup;
        return r;
    }
};

bool in_core(const GridField& f, std::size_t i) {
    const auto x = f.point(i);
    const double r = f.half_width() / 8.0;
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= r * r;
}

void require_resolved(const ResidualReport& r, const char* which) {
    if (!(r.rel_l2_core <= 0.5)) {
        throw NumericalError("resolution", which, format_value(r.rel_l2_core),
                             std::string(which) + ": relative core residual above 0.5, grid unusable");
    }
}

void require_matching(const SystemParams& p, const GridField& U) {
    if (U.dim() != p.n()) {
        throw DomainError("grid_dim", std::to_string(U.dim()), "field dimension differs from n");
    }
}

double signed_pow(double v, double q) {
    return std::copysign(std::pow(std::abs(v), q), v);
}

} // namespace

ResidualReport pde_residual_single(const SystemParams& p, const GridField& U) {
    require_matching(p, U);
    const GridField lap = frac_laplacian(U, p.s());
    const double q = p.two_star() - 1.0;
    CoreAccumulator acc;
    for (std::size_t i = 0; i < U.size(); ++i) {
        if (!in_core(U, i)) continue;
        const double rhs = signed_pow(U[i], q);
        acc.add(lap[i] - rhs, rhs);
    }
    const ResidualReport r = acc.report();
    require_resolved(r, "single");
    return r;
}

std::pair<ResidualReport, ResidualReport> pde_residual_system(const SystemParams& p, double k,
                                                              double l, const GridField& U) {
    require_matching(p, U);
    if (!(k > 0.0) || !(l > 0.0)) {
        throw DomainError("kl_positive", format_value(std::min(k, l)), "require k, l > 0");
    }
    const double a = p.alpha();
    const double b = p.beta();
    const double ts = p.two_star();
    const double c1 = a * p.gamma() / ts;
    const double c2 = b * p.gamma() / ts;
    const double sk = std::sqrt(k);
    const double sl = std::sqrt(l);

    auto equation = [&](bool first) {
        GridField w(U.dim(), U.points_per_axis(), U.half_width());
        const double scale = first ? sk : sl;
        for (std::size_t i = 0; i < U.size(); ++i) w[i] = scale * U[i];
        const GridField lap = frac_laplacian(w, p.s());
        CoreAccumulator acc;
        for (std::size_t i = 0; i < U.size(); ++i) {
            if (!in_core(U, i)) continue;
            const double u = sk * U[i];
            const double v = sl * U[i];
            double rhs;
            if (first) {
                rhs = p.mu1() * signed_pow(u, ts - 1.0) +
                      c1 * signed_pow(u, a - 1.0) * std::pow(std::abs(v), b);
            } else {
                rhs = p.mu2() * signed_pow(v, ts - 1.0) +
                      c2 * std::pow(std::abs(u), a) * signed_pow(v, b - 1.0);
            }
            acc.add(lap[i] - rhs, rhs);
        }
        return acc.report();
    };

    const ResidualReport r1 = equation(true);
    require_resolved(r1, "system_first");
    const ResidualReport r2 = equation(false);
    require_resolved(r2, "system_second");
    return {r1, r2};
}

VerifyResult verify_synchronized(const SystemParams& p, double k, double l, const VerifyConfig& cfg) {
    validate_grid(p.n(), cfg.L, cfg.N);
    const double S = sobolev_constant_closed_form(p).value;
    const BubbleSpec spec{cfg.epsilon, {}, 1.0};

    VerifyResult out{k, l, S, {}, {}, {}, normalized_bubble(p, spec, S, cfg.L, cfg.N)};
    out.single = pde_residual_single(p, out.bubble);
    std::tie(out.first, out.second) = pde_residual_system(p, k, l, out.bubble);

    if (cfg.check_doubling) {
        ResidualReport single2, first2, second2;
        {
            const GridField U2 = normalized_bubble(p, spec, S, 2.0 * cfg.L, 2 * cfg.N);
            single2 = pde_residual_single(p, U2);
            std::tie(first2, second2) = pde_residual_system(p, k, l, U2);
        }
        auto flag = [](ResidualReport& base, const ResidualReport& doubled) {
            const double ref = std::max(base.rel_l2_core, 1e-300);
            base.truncation_flag = std::abs(doubled.rel_l2_core - base.rel_l2_core) / ref > 0.5;
        };
        flag(out.single, single2);
        flag(out.first, first2);
        flag(out.second, second2);
    }
    return out;
}

// ---------------------------------------------------------------- dumps

namespace {

constexpr char kMagic[8] = {'C', 'R', 'I', 'T', 'S', 'Y', 'S', '1'};

template <class T>
void put_le(std::ostream& os, T v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    is.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if (!is) throw DomainError("dump_truncated", "", "field dump is truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

} // namespace

void dump_field(const std::string& path, const GridField& field, double s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DomainError("dump_path", path, "cannot open " + path);
    os.write(kMagic, sizeof kMagic);
    put_le<std::int32_t>(os, field.dim());
    put_le<std::int32_t>(os, field.points_per_axis());
    put_le<double>(os, field.half_width());
    put_le<double>(os, s);
    for (double v : field.values()) put_le<double>(os, v);
    if (!os) throw DomainError("dump_path", path, "write failed for " + path);
}

FieldDump read_field_dump(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DomainError("dump_path", path, "cannot open " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw DomainError("dump_magic", path, "not a CRITSYS1 field dump");
    }
    const int n = get_le<std::int32_t>(is);
    const int N = get_le<std::int32_t>(is);
    const double L = get_le<double>(is);
    const double s = get_le<double>(is);
    GridField f(n, N, L);
    for (double& v : f.values()) v = get_le<double>(is);
    return {s, std::move(f)};
}

} // namespace critsys
