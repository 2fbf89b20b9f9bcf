#include "critsys/grid_field.hpp"

#include <cmath>
#include <string>

#include "critsys/errors.hpp"

namespace critsys {

GridField::GridField(int n, int N, double L) : n_(n), N_(N), L_(L) {
    if (n < 1 || n > 3) throw DomainError("grid_dim", std::to_string(n), "grid dimension must be 1, 2 or 3");
    if (N < 1) throw DomainError("grid_points", std::to_string(N), "N must be positive");
    if (!(L > 0.0)) throw DomainError("grid_half_width", format_value(L), "L must be positive");
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(N);
    values_.assign(total, 0.0);
}

GridField::GridField(int n, int N, double L, std::vector<double> values) : GridField(n, N, L) {
    if (values.size() != values_.size()) {
        throw DomainError("grid_size", std::to_string(values.size()), "value count must equal N^n");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError("grid_finite", format_value(v), "grid values must be finite");
    }
    values_ = std::move(values);
}

double GridField::cell_volume() const noexcept {
    return std::pow(spacing(), n_);
}

std::array<double, 3> GridField::point(std::size_t i) const noexcept {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int d = n_ - 1; d >= 0; --d) {
        x[d] = axis_coordinate(static_cast<int>(i % N_));
        i /= N_;
    }
    return x;
}

std::size_t GridField::reflected_index(std::size_t i) const noexcept {
    // x_j = -L + j h reflects to x_{(N - j) mod N}.
    std::size_t out = 0;
    std::size_t stride = 1;
    for (int d = n_ - 1; d >= 0; --d) {
        const std::size_t j = i % N_;
        i /= N_;
        out += ((N_ - j) % N_) * stride;
        stride *= N_;
    }
    return out;
}

double GridField::dot(const GridField& other) const {
    if (other.size() != size()) throw DomainError("grid_size", std::to_string(other.size()), "grid mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i] * other.values_[i];
    return acc * cell_volume();
}

double GridField::integral_abs_pow(double q) const {
    double acc = 0.0;
    for (double v : values_) acc += std::pow(std::abs(v), q);
    return acc * cell_volume();
}

} // namespace critsys
