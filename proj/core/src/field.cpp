#include "retrodiff/field.hpp"

#include "retrodiff/errors.hpp"
#include "retrodiff/fft.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace retrodiff {

namespace {

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid()))
        throw InvalidInputError("fields live on different grids");
}

double ipow(double base, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= base;
    return r;
}

// Row/column transforms for d = 2; trivial pass-through for d = 1.
void fft_nd(std::vector<std::complex<double>>& data, const GridSpec& grid, bool inverse) {
    const std::size_t n = static_cast<std::size_t>(grid.n_per_axis);
    if (grid.dim == 1) {
        fft_inplace(std::span(data), inverse);
        return;
    }
    for (std::size_t row = 0; row < n; ++row)
        fft_inplace(std::span(data).subspan(row * n, n), inverse);
    std::vector<std::complex<double>> column(n);
    for (std::size_t col = 0; col < n; ++col) {
        for (std::size_t row = 0; row < n; ++row) column[row] = data[row * n + col];
        fft_inplace(std::span(column), inverse);
        for (std::size_t row = 0; row < n; ++row) data[row * n + col] = column[row];
    }
}

} // namespace

SpectralField::SpectralField(GridSpec grid, std::vector<std::complex<double>> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
    validate(grid_);
    if (coeffs_.size() != grid_.size())
        throw InvalidInputError("coefficient count does not match the grid");
}

SpectralField SpectralField::zero(const GridSpec& grid) {
    validate(grid);
    return SpectralField(grid, std::vector<std::complex<double>>(grid.size()));
}

SpectralField transform(std::span<const double> values, const GridSpec& grid) {
    validate(grid);
    if (values.size() != grid.size())
        throw InvalidInputError("transform input has " + std::to_string(values.size()) +
                                " entries, grid expects " + std::to_string(grid.size()));
    std::vector<std::complex<double>> data(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw InvalidInputError("transform input contains a non-finite value");
        data[i] = values[i];
    }
    fft_nd(data, grid, /*inverse=*/false);
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (auto& c : data) c *= scale;
    return SpectralField(grid, std::move(data));
}

std::vector<double> inverse_transform(const SpectralField& v) {
    std::vector<std::complex<double>> data = v.coeffs();
    fft_nd(data, v.grid(), /*inverse=*/true);
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real();
    return out;
}

double sobolev_norm(const SpectralField& v, int p) {
    if (p < 0) throw InvalidInputError("sobolev order must be nonnegative");
    const EigenvalueMap ev(v.grid());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        sum += std::norm(v[i]) * ipow(ev[i], p);
    return std::sqrt(sum);
}

double gevrey_norm(const SpectralField& v, double sigma, int p) {
    if (sigma < 0.0) throw InvalidInputError("gevrey sigma must be nonnegative");
    if (p < 0) throw InvalidInputError("sobolev order must be nonnegative");
    const EigenvalueMap ev(v.grid());
    if (sigma * std::sqrt(ev.max()) > 700.0) {
        const auto j = mode_vector(v.grid(), static_cast<std::size_t>(
            std::max_element(ev.values().begin(), ev.values().end()) - ev.values().begin()));
        throw OverflowGuardError("gevrey weight overflows at mode (" + std::to_string(j[0]) +
                                 "," + std::to_string(j[1]) + "): sigma*sqrt(lambda) = " +
                                 std::to_string(sigma * std::sqrt(ev.max())) + " > 700");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        sum += std::norm(v[i]) * ipow(ev[i], p) * std::exp(2.0 * sigma * std::sqrt(ev[i]));
    return std::sqrt(sum);
}

SpectralField project_cutoff(const SpectralField& v, double c_eps) {
    if (!(c_eps >= 1.0)) throw InvalidInputError("cut-off level must be >= 1");
    const EigenvalueMap ev(v.grid());
    SpectralField out = v;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (ev[i] > c_eps) out[i] = 0.0;
    return out;
}

double hermitian_defect(const SpectralField& v) {
    const GridSpec& g = v.grid();
    double worst = 0.0;
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
        const auto j = mode_vector(g, flat);
        // -n/2 has no stored partner; its Hermitian condition is Im = 0.
        std::array<int, 2> neg{};
        for (int a = 0; a < 2; ++a) neg[a] = (j[a] == -g.n_per_axis / 2) ? j[a] : -j[a];
        const std::complex<double> partner = v[flat_index(g, neg)];
        worst = std::max(worst, std::abs(v[flat] - std::conj(partner)));
    }
    return worst;
}

void enforce_hermitian(SpectralField& v) {
    const GridSpec& g = v.grid();
    SpectralField sym = v;
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
        const auto j = mode_vector(g, flat);
        std::array<int, 2> neg{};
        for (int a = 0; a < 2; ++a) neg[a] = (j[a] == -g.n_per_axis / 2) ? j[a] : -j[a];
        sym[flat] = 0.5 * (v[flat] + std::conj(v[flat_index(g, neg)]));
    }
    v = std::move(sym);
}

SpectralField add(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    SpectralField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

SpectralField subtract(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a, b);
    SpectralField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

SpectralField scale(const SpectralField& a, double factor) {
    SpectralField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
    return out;
}

double sobolev_distance(const SpectralField& a, const SpectralField& b, int p) {
    require_same_grid(a, b);
    const EigenvalueMap ev(a.grid());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += std::norm(a[i] - b[i]) * ipow(ev[i], p);
    return std::sqrt(sum);
}

double max_abs_value(const SpectralField& v) {
    const std::vector<double> values = inverse_transform(v);
    double m = 0.0;
    for (double x : values) m = std::max(m, std::abs(x));
    return m;
}

} // namespace retrodiff
