#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace retrodiff {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Periodic cube [0, ell]^d sampled on n_per_axis points per axis.
///
/// Fields live on this grid either as point values (physical space) or as
/// Fourier coefficients indexed by integer modes j with each component in
/// [-n/2, n/2).  n_per_axis must be a power of two and >= 8; dim is 1 or 2.
struct GridSpec {
    int dim = 1;
    double ell = kTwoPi;
    int n_per_axis = 64;

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n_per_axis);
        return s;
    }

    /// Angular wavenumber spacing 2*pi/ell.
    double k0() const { return kTwoPi / ell; }

    bool operator==(const GridSpec&) const = default;
};

/// Throws InvalidInputError unless the spec satisfies its invariants.
void validate(const GridSpec& grid);

/// Signed mode component for storage index k on an n-point axis
/// (k < n/2 -> k, else k - n).
inline int mode_of_index(int k, int n) { return k < n / 2 ? k : k - n; }

/// Storage index of signed mode j on an n-point axis.
inline int index_of_mode(int j, int n) { return j >= 0 ? j : j + n; }

/// Signed mode vector of a flat (row-major) coefficient index.
std::array<int, 2> mode_vector(const GridSpec& grid, std::size_t flat);

/// Flat index of a signed mode vector.
std::size_t flat_index(const GridSpec& grid, std::array<int, 2> j);

/// Spectrum of A = I - Laplacian on the periodic grid:
/// lambda_j = 1 + (2*pi/ell)^2 |j|^2 per stored mode, row-major.
///
/// lambda_0 = 1, every eigenvalue >= 1, and the map is radially
/// nondecreasing in |j|.
class EigenvalueMap {
public:
    explicit EigenvalueMap(const GridSpec& grid);

    double operator[](std::size_t flat) const { return lambda_[flat]; }
    const std::vector<double>& values() const { return lambda_; }
    double max() const { return max_; }
    const GridSpec& grid() const { return grid_; }

private:
    GridSpec grid_;
    std::vector<double> lambda_;
    double max_ = 1.0;
};

} // namespace retrodiff
