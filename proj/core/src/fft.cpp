#include "retrodiff/fft.hpp"

#include "retrodiff/errors.hpp"
#include "retrodiff/grid.hpp"

#include <cmath>
#include <cstddef>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

namespace retrodiff {

namespace {

struct Tables {
    std::vector<std::size_t> bitrev;
    std::vector<std::complex<double>> twiddle; // exp(-i*pi*k/half) for the largest stage
};

// Twiddle/bit-reversal tables per transform size.  The cache makes repeated
// transforms of the same size cheap; table contents are deterministic.
const Tables& tables_for(std::size_t n) {
    static std::mutex mutex;
    static std::unordered_map<std::size_t, Tables> cache;
    std::scoped_lock lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Tables t;
    t.bitrev.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        t.bitrev[i] = r;
    }
    t.twiddle.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        t.twiddle[k] = {std::cos(angle), std::sin(angle)};
    }
    return cache.emplace(n, std::move(t)).first->second;
}

} // namespace

void fft_inplace(std::span<std::complex<double>> data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw InvalidInputError("fft length must be a power of two, got " + std::to_string(n));
    if (n == 1) return;

    const Tables& t = tables_for(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = t.bitrev[i];
        if (i < r) std::swap(data[i], data[r]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len; // index step into the full-size twiddle table
        for (std::size_t block = 0; block < n; block += len) {
            for (std::size_t k = 0; k < half; ++k) {
                std::complex<double> w = t.twiddle[k * stride];
                if (inverse) w = std::conj(w);
                const std::complex<double> odd = data[block + k + half] * w;
                const std::complex<double> even = data[block + k];
                data[block + k] = even + odd;
                data[block + k + half] = even - odd;
            }
        }
    }
}

} // namespace retrodiff
