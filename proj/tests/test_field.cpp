#include <doctest.h>

#include "retrodiff/errors.hpp"
#include "retrodiff/field.hpp"
#include "retrodiff/field_io.hpp"

#include "support/test_support.hpp"

#include <complex>
#include <sstream>

using namespace retrodiff;
using testsupport::random_field;
using testsupport::random_values;

namespace {

// Brute-force weighted mode sum, the reference for every norm test.
double mode_loop_norm(const SpectralField& v, double sigma, int p) {
    const GridSpec& g = v.grid();
    const double k0sq = g.k0() * g.k0();
    double sum = 0.0;
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
        const auto j = mode_vector(g, flat);
        const double lambda = 1.0 + k0sq * (double(j[0]) * j[0] + double(j[1]) * j[1]);
        double w = std::norm(v[flat]);
        for (int q = 0; q < p; ++q) w *= lambda;
        sum += w * std::exp(2.0 * sigma * std::sqrt(lambda));
    }
    return std::sqrt(sum);
}

} // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(validate(GridSpec{3, kTwoPi, 64}), InvalidInputError);
    CHECK_THROWS_AS(validate(GridSpec{1, kTwoPi, 48}), InvalidInputError);
    CHECK_THROWS_AS(validate(GridSpec{1, kTwoPi, 4}), InvalidInputError);
    CHECK_THROWS_AS(validate(GridSpec{1, -1.0, 64}), InvalidInputError);
    CHECK_NOTHROW(validate(GridSpec{2, 5.0, 8}));
}

TEST_CASE("eigenvalue map") {
    const GridSpec grid{1, kTwoPi, 16};
    const EigenvalueMap ev(grid);
    CHECK(ev[0] == 1.0);
    for (double l : ev.values()) CHECK(l >= 1.0);
    CHECK(ev[flat_index(grid, {3, 0})] == doctest::Approx(10.0).epsilon(1e-15));
    // radially nondecreasing
    for (int j = 0; j < 7; ++j)
        CHECK(ev[flat_index(grid, {j, 0})] <= ev[flat_index(grid, {j + 1, 0})]);
}

TEST_CASE("transform of a constant field hits only mode zero") {
    const GridSpec grid{1, kTwoPi, 32};
    std::vector<double> values(grid.size(), 3.25);
    const SpectralField v = transform(values, grid);
    CHECK(v[0].real() == doctest::Approx(3.25).epsilon(1e-15));
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(std::abs(v[i]) < 1e-14);
}

TEST_CASE("transform of cos(2 pi x / ell) splits into the +-1 modes") {
    const GridSpec grid{1, 5.0, 32};
    std::vector<double> values(grid.size());
    for (std::size_t m = 0; m < values.size(); ++m)
        values[m] = std::cos(kTwoPi * (m * grid.ell / grid.n_per_axis) / grid.ell);
    const SpectralField v = transform(values, grid);
    CHECK(v.at_mode({1, 0}).real() == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(v.at_mode({-1, 0}).real() == doctest::Approx(0.5).epsilon(1e-13));
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto j = mode_vector(grid, i);
        if (std::abs(j[0]) != 1) CHECK(std::abs(v[i]) < 1e-14);
    }
}

TEST_CASE("round trip reproduces a random field to 1e-12") {
    std::mt19937_64 rng(7);
    for (const GridSpec grid : {GridSpec{1, kTwoPi, 32}, GridSpec{2, 3.0, 16}}) {
        const std::vector<double> values = random_values(rng, grid.size());
        const std::vector<double> back = inverse_transform(transform(values, grid));
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            num += (values[i] - back[i]) * (values[i] - back[i]);
            den += values[i] * values[i];
        }
        CHECK(std::sqrt(num / den) < 1e-12);
    }
}

TEST_CASE("transform rejects bad input") {
    const GridSpec grid{1, kTwoPi, 16};
    CHECK_THROWS_AS(transform(std::vector<double>(17), grid), InvalidInputError);
    std::vector<double> values(grid.size(), 0.0);
    values[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(transform(values, grid), InvalidInputError);
    GridSpec bad = grid;
    bad.n_per_axis = 24;
    CHECK_THROWS_AS(transform(std::vector<double>(24), bad), InvalidInputError);
}

TEST_CASE("hermitian symmetry of real transforms") {
    std::mt19937_64 rng(8);
    const GridSpec grid{2, kTwoPi, 16};
    const SpectralField v = random_field(rng, grid);
    CHECK(hermitian_defect(v) < 1e-14);
}

TEST_CASE("parseval against the physical quadrature") {
    std::mt19937_64 rng(9);
    for (const GridSpec grid : {GridSpec{1, kTwoPi, 64}, GridSpec{2, 4.0, 16}}) {
        const std::vector<double> values = random_values(rng, grid.size());
        const SpectralField v = transform(values, grid);
        double phys = 0.0;
        for (double x : values) phys += x * x;
        const double cell = std::pow(grid.ell / grid.n_per_axis, grid.dim);
        const double physical_l2 = std::sqrt(cell * phys);
        const double factor = std::pow(grid.ell, 0.5 * grid.dim);
        CHECK(std::abs(physical_l2 - factor * sobolev_norm(v, 0)) <= 1e-12 * physical_l2);
    }
}

TEST_CASE("sobolev norm basics") {
    const GridSpec grid{1, kTwoPi, 16};
    SpectralField v = SpectralField::zero(grid);
    v.at_mode({0, 0}) = 1.0;
    CHECK(sobolev_norm(v, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sobolev_norm(v, 3) == doctest::Approx(1.0).epsilon(1e-15));

    SpectralField w = SpectralField::zero(grid);
    w.at_mode({1, 0}) = 1.0;
    CHECK(sobolev_norm(w, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("sobolev norm matches the mode-loop oracle on dense fields") {
    std::mt19937_64 rng(10);
    for (const GridSpec grid : {GridSpec{1, 9.0, 64}, GridSpec{2, kTwoPi, 16}}) {
        const SpectralField v = random_field(rng, grid);
        const double expected = mode_loop_norm(v, 0.0, 2);
        CHECK(sobolev_norm(v, 2) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("gevrey norm") {
    const GridSpec grid{1, kTwoPi, 16};

    SUBCASE("sigma = 0 degenerates to the sobolev norm") {
        std::mt19937_64 rng(11);
        const SpectralField v = random_field(rng, grid);
        CHECK(gevrey_norm(v, 0.0, 1) == sobolev_norm(v, 1));
    }

    SUBCASE("single zero mode weighs e^sigma") {
        SpectralField v = SpectralField::zero(grid);
        v.at_mode({0, 0}) = 1.0;
        CHECK(gevrey_norm(v, 0.7, 4) == doctest::Approx(std::exp(0.7)).epsilon(1e-14));
    }

    SUBCASE("two-mode field matches the hand-summed oracle") {
        SpectralField v = SpectralField::zero(grid);
        v.at_mode({0, 0}) = 2.0;
        v.at_mode({2, 0}) = std::complex<double>(0.5, -0.5);
        v.at_mode({-2, 0}) = std::complex<double>(0.5, 0.5);
        const double lambda = 5.0;
        const double pair = 2.0 * 0.5 * lambda * std::exp(0.2 * std::sqrt(lambda));
        const double expected = std::sqrt(4.0 * std::exp(0.2) + pair);
        CHECK(gevrey_norm(v, 0.1, 1) == doctest::Approx(expected).epsilon(1e-13));
    }

    SUBCASE("overflow guard names the mode") {
        std::mt19937_64 rng(12);
        const SpectralField v = random_field(rng, grid);
        CHECK_THROWS_AS(gevrey_norm(v, 200.0, 0), OverflowGuardError);
    }

    SUBCASE("nondecreasing in sigma and p") {
        std::mt19937_64 rng(13);
        const SpectralField v = random_field(rng, grid);
        double prev = gevrey_norm(v, 0.0, 0);
        for (double sigma : {0.1, 0.2, 0.5}) {
            const double cur = gevrey_norm(v, sigma, 0);
            CHECK(cur >= prev);
            prev = cur;
        }
        CHECK(gevrey_norm(v, 0.1, 2) >= gevrey_norm(v, 0.1, 1));
    }

    SUBCASE("agrees with the mode-loop oracle") {
        std::mt19937_64 rng(14);
        const SpectralField v = random_field(rng, grid);
        CHECK(gevrey_norm(v, 0.3, 1) ==
              doctest::Approx(mode_loop_norm(v, 0.3, 1)).epsilon(1e-12));
    }
}

TEST_CASE("cut-off projection") {
    std::mt19937_64 rng(15);
    const GridSpec grid{1, kTwoPi, 32};
    const SpectralField v = random_field(rng, grid);
    const EigenvalueMap ev(grid);

    SUBCASE("full band is the identity") {
        const SpectralField p = project_cutoff(v, ev.max());
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(p[i] == v[i]);
    }

    SUBCASE("level one keeps only the zero mode") {
        const SpectralField p = project_cutoff(v, 1.0);
        CHECK(p[0] == v[0]);
        for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] == std::complex<double>(0.0));
    }

    SUBCASE("equals the mode-loop masking oracle") {
        const SpectralField p = project_cutoff(v, 5.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (ev[i] > 5.0)
                CHECK(p[i] == std::complex<double>(0.0));
            else
                CHECK(p[i] == v[i]);
        }
    }

    SUBCASE("idempotent, self-adjoint, contraction, nested") {
        const SpectralField p5 = project_cutoff(v, 5.0);
        const SpectralField p5p5 = project_cutoff(p5, 5.0);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(p5[i] == p5p5[i]);

        const SpectralField w = random_field(rng, grid);
        std::complex<double> lhs = 0.0, rhs = 0.0;
        const SpectralField pw = project_cutoff(w, 5.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            lhs += p5[i] * std::conj(w[i]);
            rhs += v[i] * std::conj(pw[i]);
        }
        CHECK(std::abs(lhs - rhs) < 1e-13);

        for (int p = 0; p <= 2; ++p) CHECK(sobolev_norm(p5, p) <= sobolev_norm(v, p));

        const SpectralField nested = project_cutoff(project_cutoff(v, 17.0), 5.0);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(nested[i] == p5[i]);
    }

    SUBCASE("rejects levels below one") {
        CHECK_THROWS_AS(project_cutoff(v, 0.5), InvalidInputError);
    }
}

TEST_CASE("field file format writes the documented bytes") {
    GridSpec grid{1, 8.0, 8};
    SpectralField v = SpectralField::zero(grid);
    v.at_mode({0, 0}) = 1.5;
    v.at_mode({1, 0}) = std::complex<double>(0.25, -0.125);
    v.at_mode({-1, 0}) = std::complex<double>(0.25, 0.125);

    const std::string expected =
        "retrodiff-field v1\n"
        "d 1\n"
        "ell 8\n"
        "n 8\n"
        "1.5 0\n"
        "0.25 -0.125\n"
        "0 0\n"
        "0 0\n"
        "0 0\n"
        "0 0\n"
        "0 0\n"
        "0.25 0.125\n";

    std::ostringstream out;
    write_field(out, v);
    CHECK(out.str() == expected);

    std::istringstream in(out.str());
    const SpectralField back = read_field(in);
    CHECK(back.grid() == grid);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
}

TEST_CASE("field file round trip is bit exact for awkward values") {
    std::mt19937_64 rng(16);
    const GridSpec grid{1, kTwoPi, 16};
    const SpectralField v = random_field(rng, grid);
    std::ostringstream out;
    write_field(out, v);
    std::istringstream in(out.str());
    const SpectralField back = read_field(in);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == v[i]);
}

TEST_CASE("field file reader rejects junk") {
    std::istringstream bad("not a field\n");
    CHECK_THROWS_AS(read_field(bad), IoError);
    std::istringstream truncated("retrodiff-field v1\nd 1\nell 8\nn 8\n1 0\n");
    CHECK_THROWS_AS(read_field(truncated), IoError);
}
