#include "retrodiff/noise.hpp"

#include "retrodiff/errors.hpp"

#include <cmath>
#include <random>

namespace retrodiff {

namespace {

// Uniform in (0,1] from the top 53 bits; fully specified, unlike the
// distribution adaptors in <random>.
double uniform01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng, bool& have_spare, double& spare) {
    if (have_spare) {
        have_spare = false;
        return spare;
    }
    const double u = uniform01(rng);
    const double v = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u));
    have_spare = true;
    spare = r * std::sin(kTwoPi * v);
    return r * std::cos(kTwoPi * v);
}

} // namespace

SpectralField inject_noise(const SpectralField& gT, double eps, std::uint64_t seed, int p) {
    if (eps < 0.0) throw InvalidInputError("noise level must be nonnegative");
    if (eps == 0.0) return gT;

    std::mt19937_64 rng(seed);
    bool have_spare = false;
    double spare = 0.0;
    std::vector<double> white(gT.grid().size());
    for (double& x : white) x = gaussian(rng, have_spare, spare);

    SpectralField eta = transform(white, gT.grid());
    const EigenvalueMap ev(gT.grid());
    for (std::size_t i = 0; i < eta.size(); ++i)
        eta[i] *= std::pow(1.0 + ev[i], -0.5 * p);

    const double norm = sobolev_norm(eta, 0);
    if (norm == 0.0) throw InvalidInputError("degenerate noise draw");
    return add(gT, scale(eta, eps / norm));
}

SpectralField spectral_decay_profile(const GridSpec& grid, double amplitude, double decay) {
    validate(grid);
    if (!(decay > 0.0)) throw InvalidInputError("profile decay must be positive");
    const EigenvalueMap ev(grid);
    SpectralField v = SpectralField::zero(grid);
    const int jmax = grid.n_per_axis / 2 - 1;
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
        const auto j = mode_vector(grid, flat);
        if (std::abs(j[0]) > jmax || std::abs(j[1]) > jmax) continue;
        const double mag = 0.5 * amplitude * std::pow(ev[flat], -decay);
        // Fixed phase twist; conjugate-odd in j keeps the field real.
        const double phase = 0.7 * (j[0] + 0.37 * j[1]);
        v[flat] = mag * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    enforce_hermitian(v);
    return v;
}

SpectralField cosine_bump_profile(const GridSpec& grid, double amplitude) {
    validate(grid);
    const int n = grid.n_per_axis;
    std::vector<double> values(grid.size());
    for (std::size_t m = 0; m < values.size(); ++m) {
        const double x = kTwoPi * static_cast<double>(m % n) / n;
        double v = std::exp(2.0 * (std::cos(x) - 1.0));
        if (grid.dim == 2) {
            const double y = kTwoPi * static_cast<double>(m / n) / n;
            v *= std::exp(2.0 * (std::cos(y) - 1.0));
        }
        values[m] = amplitude * v;
    }
    return transform(values, grid);
}

} // namespace retrodiff
