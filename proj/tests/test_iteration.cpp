#include <doctest.h>

#include "retrodiff/errors.hpp"
#include "retrodiff/dealias.hpp"
#include "retrodiff/forward.hpp"
#include "retrodiff/iteration.hpp"
#include "retrodiff/noise.hpp"

#include "support/test_support.hpp"

#include <cmath>
#include <sstream>

using namespace retrodiff;

namespace {

Nonlinearity michaelis() { return catalog("michaelis_menten", {{"a", 1}, {"b", 1}}); }

// Michaelis-Menten testbed shared by several cases: modest band, T = 0.25.
struct Testbed {
    GridSpec grid{1, kTwoPi, 32};
    double T = 0.25;
    RegularizationPlan plan;
    SpectralField data;

    Testbed() : plan(pinned_plan(grid, T, 0.0, 1, 4.0)), data(SpectralField::zero(grid)) {
        const SpectralField g0 = cosine_bump_profile(grid, 0.3);
        const Trajectory traj = evolve(g0, michaelis(), T, {64, 1, 1e6});
        data = inject_noise(traj.final_state(), 1e-4, 11, 1);
    }
};

} // namespace

TEST_CASE("gamma kernels") {
    SUBCASE("empty range vanishes") {
        CHECK(gamma_integral(0.5, 0.5, 7.0) == 0.0);
        CHECK(gamma_bar(0.5, 0.5, 7.0) == 0.0);
    }

    SUBCASE("unit eigenvalue over a unit window") {
        CHECK(gamma_integral(0.0, 1.0, 1.0) ==
              doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    }

    SUBCASE("closed form matches adaptive quadrature") {
        std::mt19937_64 rng(401);
        for (int i = 0; i < 25; ++i) {
            const double T = testsupport::uniform(rng, 0.2, 1.0);
            const double t = testsupport::uniform(rng, 0.0, T);
            const double lambda = testsupport::uniform(rng, 1.0, 12.0);
            const double oracle = testsupport::adaptive_simpson(
                [&](double s) { return std::exp((s - t) * lambda); }, t, T);
            CHECK(gamma_integral(t, T, lambda) ==
                  doctest::Approx(oracle).epsilon(1e-12));
        }
    }

    SUBCASE("guards") {
        CHECK_THROWS_AS(gamma_integral(0.0, 1.0, 0.5), InvalidInputError);
        CHECK_THROWS_AS(gamma_integral(2.0, 1.0, 5.0), InvalidInputError);
        CHECK_THROWS_AS(gamma_integral(0.0, 1.0, 800.0), OverflowGuardError);
    }
}

TEST_CASE("stabilization constant") {
    const GridSpec grid{1, kTwoPi, 16};

    SUBCASE("exponential term dominates for large cut-offs") {
        const RegularizationPlan plan = pinned_plan(grid, 1.0, 0.0, 1, 10.0);
        CHECK(choose_K(0.5, plan, michaelis()) ==
              doctest::Approx(std::exp(10.0)).epsilon(1e-14));
    }

    SUBCASE("at t_n = T the gamma term is zero") {
        const RegularizationPlan plan = pinned_plan(grid, 0.25, 0.0, 1, 2.0);
        CHECK(choose_K(0.25, plan, michaelis()) ==
              doctest::Approx(std::exp(0.5)).epsilon(1e-14));
    }

    SUBCASE("hand evaluation for michaelis-menten") {
        const RegularizationPlan plan = pinned_plan(grid, 0.25, 0.0, 1, 2.0);
        // L1 = a/b = 1; gamma_bar(0) = (e^{0.5} - 1)/2 = 0.3244; e^{TC} = e^{0.5}
        CHECK(choose_K(0.0, plan, michaelis()) ==
              doctest::Approx(std::exp(0.5)).epsilon(1e-14));
        CHECK(choose_K(0.0, plan, michaelis(), KRule::GammaOnly) ==
              doctest::Approx((std::exp(0.5) - 1.0) / 2.0).epsilon(1e-14));
        // monotone in C_eps
        const RegularizationPlan wider = pinned_plan(grid, 0.25, 0.0, 1, 6.0);
        CHECK(choose_K(0.0, wider, michaelis()) > choose_K(0.0, plan, michaelis()));
    }

    SUBCASE("missing non-degeneracy constants are a configuration error") {
        const RegularizationPlan plan = pinned_plan(grid, 0.25, 0.0, 1, 2.0);
        CHECK_THROWS_AS(choose_K(0.0, plan, catalog("budworm")), InvalidInputError);
    }
}

TEST_CASE("degenerate F = 0 iteration is the damped affine recursion") {
    const GridSpec grid{1, kTwoPi, 16};
    const Nonlinearity zero = catalog("von_bertalanffy", {{"a", 0}, {"b", 0}, {"N", 1}});
    std::mt19937_64 rng(402);
    const SpectralField g = testsupport::random_field(rng, grid);
    const RegularizationPlan plan = pinned_plan(grid, 0.5, 0.0, 1, 5.0);
    const EigenvalueMap ev(grid);

    SchemeOptions opt;
    opt.node_count = 2;
    opt.sweeps = 48;
    opt.k_override = 3.0; // zero law carries no non-degeneracy constants
    const SchemeState state = iterate(g, zero, plan, opt);

    const double mu = 3.0 / 4.0;
    for (std::size_t ni = 0; ni < state.nodes.size(); ++ni) {
        // ratios are exactly K/(K+1) for the affine recursion
        for (double r : state.ratios[ni]) CHECK(r == doctest::Approx(mu).epsilon(1e-13));
        // iterates home in on the truncated linear reconstruction
        const double t_n = state.nodes[ni];
        SpectralField fixed = SpectralField::zero(grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (plan.mode_mask[i]) fixed[i] = std::exp((plan.T - t_n) * ev[i]) * g[i];
        const double err = sobolev_distance(state.iterates[ni].back(), fixed, 1);
        CHECK(err <= 2.0 * std::pow(mu, 48) * sobolev_norm(fixed, 1));
    }
}

TEST_CASE("single-mode hand recursion matches the implementation") {
    const GridSpec grid{1, kTwoPi, 16};
    const Nonlinearity linear = catalog("von_bertalanffy", {{"a", 1}, {"b", 0}, {"N", 1}});
    SpectralField g = SpectralField::zero(grid);
    g.at_mode({1, 0}) = 0.3;
    g.at_mode({-1, 0}) = 0.3;
    const double T = 0.5, K = 2.0;
    const RegularizationPlan plan = pinned_plan(grid, T, 0.0, 1, 2.0);

    SchemeOptions opt;
    opt.node_count = 1; // single node at t_1 = 0
    opt.sweeps = 3;
    opt.k_override = K;
    const SchemeState state = iterate(g, linear, plan, opt);

    const double lambda = 2.0;
    const double d = std::exp(T * lambda) * 0.3;
    const double gam = (std::exp(T * lambda) - 1.0) / lambda;
    double x = 0.0;
    for (int r = 0; r < 3; ++r) {
        x = (K * x + d - gam * x) / (K + 1.0);
        CHECK(state.iterates[0][r + 1].at_mode({1, 0}).real() ==
              doctest::Approx(x).epsilon(1e-14));
    }
}

TEST_CASE("michaelis-menten testbed contracts below mu_bar at every sweep") {
    const Testbed bed;
    SchemeOptions opt;
    opt.node_count = 4;
    opt.sweeps = 40;
    const SchemeState state = iterate(bed.data, michaelis(), bed.plan, opt);

    for (std::size_t ni = 0; ni < state.nodes.size(); ++ni) {
        const double mu = state.mu_bar(ni);
        CHECK(state.k_values[ni] ==
              doctest::Approx(std::exp(bed.T * bed.plan.c_eps())).epsilon(1e-14));
        for (double r : state.ratios[ni]) CHECK(r <= mu + 1e-12);
    }
}

TEST_CASE("cauchy tail and uniform bound envelopes") {
    const Testbed bed;
    SchemeOptions opt;
    opt.node_count = 2;
    opt.sweeps = 32;
    const SchemeState state = iterate(bed.data, michaelis(), bed.plan, opt);
    const int p = bed.plan.p;

    for (std::size_t ni = 0; ni < state.nodes.size(); ++ni) {
        const double mu = state.mu_bar(ni);
        const double u1 = sobolev_norm(state.iterates[ni][1], p);

        // |u^{r+l} - u^r| <= mu^r (1 - mu^l)/(1 - mu) |u^1|
        for (int r : {2, 5, 9}) {
            for (int l : {1, 2, 4}) {
                const double gap = sobolev_distance(state.iterates[ni][r + l],
                                                    state.iterates[ni][r], p);
                const double envelope =
                    std::pow(mu, r) * (1.0 - std::pow(mu, l)) / (1.0 - mu) * u1;
                CHECK(gap <= envelope * (1.0 + 1e-10));
            }
        }

        // |u^{r}| <= C sum_{j<=r} mu^j |g| with C fitted on the first sweeps
        const double gnorm = sobolev_norm(state.data, p);
        double c_fit = 0.0;
        for (int r = 1; r <= 4; ++r) {
            double geo = 0.0;
            for (int j = 1; j <= r; ++j) geo += std::pow(mu, j);
            c_fit = std::max(c_fit, sobolev_norm(state.iterates[ni][r], p) / (geo * gnorm));
        }
        for (std::size_t r = 1; r < state.iterates[ni].size(); ++r) {
            double geo = 0.0;
            for (std::size_t j = 1; j <= r; ++j) geo += std::pow(mu, static_cast<double>(j));
            CHECK(sobolev_norm(state.iterates[ni][r], p) <=
                  1.05 * c_fit * geo * gnorm + 1e-12);
        }
    }
}

TEST_CASE("converged iterate satisfies the update equation") {
    const Testbed bed;
    SchemeOptions opt;
    opt.node_count = 2;
    opt.sweeps = 80;
    const SchemeState state = iterate(bed.data, michaelis(), bed.plan, opt);
    const EigenvalueMap ev(bed.grid);

    for (std::size_t ni = 0; ni < state.nodes.size(); ++ni) {
        const double t_n = state.nodes[ni];
        const double K = state.k_values[ni];
        const SpectralField& u = state.iterates[ni].back();
        SpectralField fhat = pointwise_apply_dealiased(u, michaelis().eval);
        double residual = 0.0;
        for (std::size_t i = 0; i < bed.grid.size(); ++i) {
            if (!bed.plan.mode_mask[i]) continue;
            const std::complex<double> data_term =
                std::exp((bed.plan.T - t_n) * ev[i]) * state.data[i];
            const std::complex<double> next =
                (K * u[i] + data_term - gamma_integral(t_n, bed.plan.T, ev[i]) * fhat[i]) /
                (K + 1.0);
            residual = std::max(residual, std::abs(next - u[i]));
        }
        CHECK(residual <= 1e-10);
    }
}

TEST_CASE("node processing order does not change a bit") {
    const Testbed bed;
    SchemeOptions forward_order;
    forward_order.node_count = 4;
    forward_order.sweeps = 12;
    SchemeOptions reversed = forward_order;
    reversed.node_order = {3, 1, 2, 0};

    const SchemeState a = iterate(bed.data, michaelis(), bed.plan, forward_order);
    const SchemeState b = iterate(bed.data, michaelis(), bed.plan, reversed);
    for (std::size_t ni = 0; ni < a.nodes.size(); ++ni) {
        CHECK(a.k_values[ni] == b.k_values[ni]);
        for (std::size_t r = 0; r < a.iterates[ni].size(); ++r)
            for (std::size_t i = 0; i < a.iterates[ni][r].size(); ++i)
                CHECK(a.iterates[ni][r][i] == b.iterates[ni][r][i]);
    }
    CHECK_THROWS_AS(iterate(bed.data, michaelis(), bed.plan,
                            SchemeOptions{4, 12, KRule::Paper, std::nullopt, {0, 1}}),
                    InvalidInputError);
}

TEST_CASE("cesaro means follow the printed formula") {
    SUBCASE("all-equal iterates give ((R+1)/R) v") {
        const GridSpec grid{1, kTwoPi, 16};
        SpectralField v = SpectralField::zero(grid);
        v.at_mode({0, 0}) = 2.0;
        SchemeState state;
        state.plan = pinned_plan(grid, 0.5, 0.0, 1, 2.0);
        state.nodes = {0.25};
        state.k_values = {1.0};
        state.iterates = {{v, v, v}};
        state.cesaro_sums = {{v, add(v, v), add(add(v, v), v)}};
        const SpectralField w2 = cesaro_mean(state, 2, 0);
        CHECK(w2.at_mode({0, 0}).real() == doctest::Approx(3.0).epsilon(1e-15));
    }

    SUBCASE("R = 1 sums the first two iterates; running means stay consistent") {
        const Testbed bed;
        SchemeOptions opt;
        opt.node_count = 2;
        opt.sweeps = 16;
        const SchemeState state = iterate(bed.data, michaelis(), bed.plan, opt);

        const SpectralField w1 = cesaro_mean(state, 1, 0);
        const SpectralField direct1 = add(state.iterates[0][0], state.iterates[0][1]);
        for (std::size_t i = 0; i < w1.size(); ++i)
            CHECK(std::abs(w1[i] - direct1[i]) <= 1e-15);

        for (int R : {4, 9, 16}) {
            SpectralField direct = state.iterates[0][0];
            for (int r = 1; r <= R; ++r) direct = add(direct, state.iterates[0][r]);
            direct = scale(direct, 1.0 / R);
            const SpectralField w = cesaro_mean(state, R, 0);
            double worst = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i)
                worst = std::max(worst, std::abs(w[i] - direct[i]));
            CHECK(worst <= 1e-14);
        }

        CHECK_THROWS_AS(cesaro_mean(state, 0, 0), InvalidInputError);
        CHECK_THROWS_AS(cesaro_mean(state, 17, 0), InvalidInputError);
    }

    SUBCASE("scalar-model oracle pins the cesaro transient") {
        // Scalar recursion x <- (K x + c)/(K + 1) from x = 0: plain errors are
        // mu^R |x*|, the printed cesaro mean errs by (mu/R)(1-mu^R)/(1-mu)|x*|,
        // an algebraically slower transient.  The field implementation on a
        // single mode must reproduce both oracle curves.
        const GridSpec grid{1, kTwoPi, 16};
        const Nonlinearity zero = catalog("von_bertalanffy", {{"a", 0}, {"b", 0}, {"N", 1}});
        SpectralField g = SpectralField::zero(grid);
        g.at_mode({0, 0}) = 1.0;
        const RegularizationPlan plan = pinned_plan(grid, 0.5, 0.0, 1, 1.0);
        SchemeOptions opt;
        opt.node_count = 1;
        opt.sweeps = 16;
        opt.k_override = 3.0;
        const SchemeState state = iterate(g, zero, plan, opt);

        const double mu = 3.0 / 4.0;
        const double xstar = std::exp(0.5); // fixed point e^{(T-0) lambda_0} g_0
        for (int R : {4, 8, 16}) {
            const double plain =
                std::abs(state.iterates[0][R].at_mode({0, 0}).real() - xstar);
            const double cesaro =
                std::abs(cesaro_mean(state, R, 0).at_mode({0, 0}).real() - xstar);
            const double plain_oracle = std::pow(mu, R) * xstar;
            const double cesaro_oracle =
                mu / R * (1.0 - std::pow(mu, R)) / (1.0 - mu) * xstar;
            CHECK(plain == doctest::Approx(plain_oracle).epsilon(1e-12));
            CHECK(cesaro == doctest::Approx(cesaro_oracle).epsilon(1e-12));
            CHECK(cesaro > plain); // averaging trails the geometric iterate here
        }
    }
}

TEST_CASE("convergence report against the picard reference") {
    const Testbed bed;
    SchemeOptions opt;
    opt.node_count = 4;
    opt.sweeps = 40;
    const SchemeState state = iterate(bed.data, michaelis(), bed.plan, opt);

    // Picard block whose nodes contain every t_n = T - n T/4.
    const BackwardSolution reference =
        solve_backward(bed.data, michaelis(), bed.plan, {4 * 8 + 1, 1e-12, 100, 0.0});
    const IterationReport report = convergence_report(state, reference);

    REQUIRE(report.nodes.size() == 4);
    for (const NodeConvergence& node : report.nodes) {
        // zero initial guess: first error is the reference norm itself
        CHECK(node.errors.front() ==
              doctest::Approx(sobolev_norm(reference.state_at(node.t), bed.plan.p))
                  .epsilon(1e-12));
        CHECK(node.fitted_ratio <= 1.05 * node.mu_bar);
        CHECK(node.fitted_ratio > 0.0);
        CHECK(node.cesaro_errors.size() == node.errors.size() - 1);
    }

    // tabular export carries one row per sweep and node
    std::ostringstream out;
    write_report(out, report);
    CHECK(out.str().find("r n error ratio cesaro_error") == 0);

    // node mismatch: a reference block missing the scheme nodes
    const BackwardSolution misaligned =
        solve_backward(bed.data, michaelis(), bed.plan, {18, 1e-12, 100, 0.013});
    CHECK_THROWS_AS(convergence_report(state, misaligned), InvalidInputError);
}

TEST_CASE("contraction failure reports K and the gamma term") {
    const Testbed bed;
    const Nonlinearity strong = catalog("michaelis_menten", {{"a", 40}, {"b", 1}});
    SchemeOptions opt;
    opt.node_count = 2;
    opt.sweeps = 30;
    opt.k_override = 0.05; // far below the admissible stabilization level
    try {
        iterate(bed.data, strong, bed.plan, opt);
        FAIL("expected a contraction failure");
    } catch (const DivergenceError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("K = ") != std::string::npos);
        CHECK(msg.find("gamma_bar*L1") != std::string::npos);
    }
}
