#pragma once

#include <complex>
#include <span>

namespace retrodiff {

/// In-place radix-2 DFT on a power-of-two-length buffer.
///
/// forward:  X_k = sum_m x_m exp(-2*pi*i*k*m/n)   (no scaling)
/// inverse:  x_m = sum_k X_k exp(+2*pi*i*k*m/n)   (no scaling)
///
/// Callers own the normalization.  Throws InvalidInputError for
/// non-power-of-two lengths.
void fft_inplace(std::span<std::complex<double>> data, bool inverse);

} // namespace retrodiff
