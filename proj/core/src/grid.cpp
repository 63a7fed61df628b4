#include "retrodiff/grid.hpp"

#include "retrodiff/errors.hpp"

#include <string>

namespace retrodiff {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

void validate(const GridSpec& grid) {
    if (grid.dim != 1 && grid.dim != 2)
        throw InvalidInputError("grid dimension must be 1 or 2, got " + std::to_string(grid.dim));
    if (!(grid.ell > 0.0))
        throw InvalidInputError("domain edge length must be positive");
    if (!is_power_of_two(grid.n_per_axis) || grid.n_per_axis < 8)
        throw InvalidInputError("points per axis must be a power of two >= 8, got " +
                                std::to_string(grid.n_per_axis));
}

std::array<int, 2> mode_vector(const GridSpec& grid, std::size_t flat) {
    const int n = grid.n_per_axis;
    if (grid.dim == 1) return {mode_of_index(static_cast<int>(flat), n), 0};
    const int k0 = static_cast<int>(flat) / n;
    const int k1 = static_cast<int>(flat) % n;
    return {mode_of_index(k0, n), mode_of_index(k1, n)};
}

std::size_t flat_index(const GridSpec& grid, std::array<int, 2> j) {
    const int n = grid.n_per_axis;
    if (grid.dim == 1) return static_cast<std::size_t>(index_of_mode(j[0], n));
    return static_cast<std::size_t>(index_of_mode(j[0], n)) * n +
           static_cast<std::size_t>(index_of_mode(j[1], n));
}

EigenvalueMap::EigenvalueMap(const GridSpec& grid) : grid_(grid) {
    validate(grid);
    const double k0sq = grid.k0() * grid.k0();
    lambda_.resize(grid.size());
    for (std::size_t flat = 0; flat < lambda_.size(); ++flat) {
        const auto j = mode_vector(grid, flat);
        const double jsq = static_cast<double>(j[0]) * j[0] + static_cast<double>(j[1]) * j[1];
        lambda_[flat] = 1.0 + k0sq * jsq;
        if (lambda_[flat] > max_) max_ = lambda_[flat];
    }
}

} // namespace retrodiff
