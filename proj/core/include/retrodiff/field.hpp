#pragma once

#include "retrodiff/grid.hpp"

#include <complex>
#include <span>
#include <vector>

namespace retrodiff {

/// Fourier coefficients of a real periodic field.
///
/// Convention (fixed once, asserted by the round-trip tests):
///   transform:          v_j = (1/n^d) sum_m v(x_m) exp(-i k0 j . x_m)
///   inverse transform:  v(x_m) = sum_j v_j exp(+i k0 j . x_m)
/// with k0 = 2*pi/ell and x_m the uniform grid points.  Coefficients are
/// stored row-major in FFT index order (axis index k holds signed mode
/// k < n/2 ? k : k - n).  Under this convention Parseval reads
///   integral |v|^2 dx = ell^d * sum_j |v_j|^2,
/// so the sequence-space norms below differ from the physical L^2 norm by
/// the constant factor ell^(d/2).
///
/// Real fields satisfy the Hermitian symmetry coeff(-j) = conj(coeff(j));
/// all operations here preserve it.  Values are immutable in spirit: every
/// operation returns a new field, so sharing across threads is safe.
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(GridSpec grid, std::vector<std::complex<double>> coeffs);

    /// All-zero field on the given grid.
    static SpectralField zero(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return coeffs_.size(); }

    const std::complex<double>& operator[](std::size_t flat) const { return coeffs_[flat]; }
    std::complex<double>& operator[](std::size_t flat) { return coeffs_[flat]; }

    const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }
    std::vector<std::complex<double>>& coeffs() { return coeffs_; }

    /// Coefficient of the signed mode vector j (second component ignored in 1d).
    const std::complex<double>& at_mode(std::array<int, 2> j) const {
        return coeffs_[flat_index(grid_, j)];
    }
    std::complex<double>& at_mode(std::array<int, 2> j) {
        return coeffs_[flat_index(grid_, j)];
    }

private:
    GridSpec grid_;
    std::vector<std::complex<double>> coeffs_;
};

/// Forward transform of real point values (normalized by 1/n^d, see above).
/// Rejects inputs whose length is not grid.size() or whose entries are not
/// all finite.
SpectralField transform(std::span<const double> values, const GridSpec& grid);

/// Point values of the field (real part after the inverse transform; the
/// imaginary residue of a Hermitian field is roundoff).
std::vector<double> inverse_transform(const SpectralField& v);

/// ( sum_j |v_j|^2 lambda_j^p )^(1/2) with lambda_j = 1 + (2 pi/ell)^2 |j|^2.
/// Equals the sequence-space L^2 norm for p = 0.
double sobolev_norm(const SpectralField& v, int p);

/// ( sum_j |v_j|^2 lambda_j^p exp(2 sigma sqrt(lambda_j)) )^(1/2).
/// Reduces to sobolev_norm for sigma = 0.  Throws OverflowGuardError when
/// sigma*sqrt(lambda_max) > 700, naming the offending mode.
double gevrey_norm(const SpectralField& v, double sigma, int p);

/// Zeroes every mode with lambda_j > c_eps.  Idempotent, self-adjoint, and a
/// contraction in every H^p norm.  Requires c_eps >= 1.
SpectralField project_cutoff(const SpectralField& v, double c_eps);

/// Largest |coeff(-j) - conj(coeff(j))| over stored mode pairs.
double hermitian_defect(const SpectralField& v);

/// Replaces the spectrum by its Hermitian part, making the field exactly real.
void enforce_hermitian(SpectralField& v);

/// Elementwise helpers used by the solvers; grids must match.
SpectralField add(const SpectralField& a, const SpectralField& b);
SpectralField subtract(const SpectralField& a, const SpectralField& b);
SpectralField scale(const SpectralField& a, double factor);

/// sobolev_norm(a - b, p) without materializing the difference.
double sobolev_distance(const SpectralField& a, const SpectralField& b, int p);

/// Largest |v(x)| over grid points.
double max_abs_value(const SpectralField& v);

} // namespace retrodiff
