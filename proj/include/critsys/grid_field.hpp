#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace critsys {

/// Real field sampled on the periodic box [-L, L)^n with N points per axis.
///
/// Values are stored row-major: the last axis varies fastest. Grid point
/// j on an axis sits at -L + j h with h = 2L/N.
class GridField {
public:
    GridField(int n, int N, double L);
    GridField(int n, int N, double L, std::vector<double> values);

    int dim() const noexcept { return n_; }
    int points_per_axis() const noexcept { return N_; }
    double half_width() const noexcept { return L_; }
    double spacing() const noexcept { return 2.0 * L_ / N_; }
    double cell_volume() const noexcept;
    std::size_t size() const noexcept { return values_.size(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    double axis_coordinate(int j) const noexcept { return -L_ + j * spacing(); }

    /// Coordinates of flat index i (unused trailing entries are zero).
    std::array<double, 3> point(std::size_t i) const noexcept;

    /// Flat index of the grid point reflected through the origin.
    std::size_t reflected_index(std::size_t i) const noexcept;

    template <class Fn>
    static GridField sample(int n, int N, double L, Fn&& fn) {
        GridField f(n, N, L);
        for (std::size_t i = 0; i < f.size(); ++i) f.values_[i] = fn(f.point(i));
        return f;
    }

    /// h^n Σ u v.
    double dot(const GridField& other) const;
    /// h^n Σ |u|^q.
    double integral_abs_pow(double q) const;

private:
    int n_;
    int N_;
    double L_;
    std::vector<double> values_;
};

} // namespace critsys
