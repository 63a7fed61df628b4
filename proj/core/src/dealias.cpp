#include "retrodiff/dealias.hpp"

#include "retrodiff/errors.hpp"
#include "retrodiff/fft.hpp"

#include <cmath>

namespace retrodiff {

namespace {

GridSpec fine_grid(const GridSpec& grid) {
    GridSpec fine = grid;
    fine.n_per_axis = 2 * grid.n_per_axis;
    return fine;
}

// Copies the coarse band onto the padded grid, dropping the coarse Nyquist
// column (its unpaired partner would break symmetry under products).
SpectralField pad_spectrum(const SpectralField& v) {
    const GridSpec& g = v.grid();
    SpectralField out = SpectralField::zero(fine_grid(g));
    const int jmax = g.n_per_axis / 2 - 1;
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
        const auto j = mode_vector(g, flat);
        if (std::abs(j[0]) > jmax || std::abs(j[1]) > jmax) continue;
        out.at_mode(j) = v[flat];
    }
    return out;
}

// Restricts a fine spectrum back to the coarse band; coarse Nyquist stays 0.
SpectralField truncate_spectrum(const SpectralField& fine, const GridSpec& coarse) {
    SpectralField out = SpectralField::zero(coarse);
    const int jmax = coarse.n_per_axis / 2 - 1;
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        const auto j = mode_vector(coarse, flat);
        if (std::abs(j[0]) > jmax || std::abs(j[1]) > jmax) continue;
        out[flat] = fine.at_mode(j);
    }
    return out;
}

} // namespace

SpectralField pointwise_apply_dealiased(const SpectralField& v,
                                        const std::function<double(double)>& f,
                                        double* max_abs) {
    const SpectralField padded = pad_spectrum(v);
    std::vector<double> values = inverse_transform(padded);
    double m = 0.0;
    for (double& x : values) {
        m = std::max(m, std::abs(x));
        x = f(x);
        if (!std::isfinite(x))
            throw InvalidInputError("nonlinearity produced a non-finite value");
    }
    if (max_abs) *max_abs = m;
    return truncate_spectrum(transform(values, padded.grid()), v.grid());
}

SpectralField dealiased_product(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid()))
        throw InvalidInputError("fields live on different grids");
    const SpectralField pa = pad_spectrum(a);
    const SpectralField pb = pad_spectrum(b);
    const std::vector<double> va = inverse_transform(pa);
    std::vector<double> vb = inverse_transform(pb);
    for (std::size_t i = 0; i < vb.size(); ++i) vb[i] *= va[i];
    return truncate_spectrum(transform(vb, pa.grid()), a.grid());
}

} // namespace retrodiff
