#pragma once

#include "retrodiff/field.hpp"

#include <functional>

namespace retrodiff {

/// Pointwise map of a real scalar function over a field, evaluated alias-free.
///
/// The spectrum is zero-padded onto a grid with twice the points per axis,
/// the function is applied to the point values there, and the result is
/// truncated back to the original band with the Nyquist column zeroed.
/// Factor-two padding keeps polynomial products up to cubic degree exact for
/// band-limited inputs, which covers the catalog reaction laws' polynomial
/// parts; rational laws are evaluated on the fine grid with the same
/// truncation.
///
/// Returns the transform of f(v(x)); Hermitian symmetry is preserved because
/// f maps reals to reals.  max_abs, when non-null, receives max|v(x)| on the
/// fine grid (used by blow-up monitors at no extra transform cost).
SpectralField pointwise_apply_dealiased(const SpectralField& v,
                                        const std::function<double(double)>& f,
                                        double* max_abs = nullptr);

/// Same padding/truncation path with f = identity omitted: the exact product
/// of two fields, used by tests to cross-check the evaluator.
SpectralField dealiased_product(const SpectralField& a, const SpectralField& b);

} // namespace retrodiff
