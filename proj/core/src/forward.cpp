#include "retrodiff/forward.hpp"

#include "retrodiff/dealias.hpp"
#include "retrodiff/errors.hpp"

#include <cmath>
#include <string>

namespace retrodiff {

namespace {

// phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2, evaluated stably.
double phi1(double z) {
    if (std::abs(z) < 0.1) {
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 10; ++k) {
            term *= z / (k + 1);
            sum += term;
        }
        return sum;
    }
    return std::expm1(z) / z;
}

double phi2(double z) {
    if (std::abs(z) < 0.1) {
        double term = 0.5, sum = 0.5;
        for (int k = 1; k <= 10; ++k) {
            term *= z / (k + 2);
            sum += term;
        }
        return sum;
    }
    return (std::expm1(z) - z) / (z * z);
}

} // namespace

const SpectralField& Trajectory::state_at(double t) const {
    const double tol = 1e-12 * std::max(1.0, horizon());
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= tol) return states[i];
    throw InvalidInputError("time " + std::to_string(t) + " is not a trajectory node");
}

std::size_t Trajectory::node_at_or_below(double t) const {
    std::size_t best = 0;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] <= t + 1e-12) best = i;
    return best;
}

Trajectory evolve(const SpectralField& g0, const Nonlinearity& f, double T,
                  const EvolveOptions& options) {
    if (!(T > 0.0)) throw InvalidInputError("horizon must be positive");
    if (options.steps < 8) throw InvalidInputError("need at least 8 time steps");
    if (options.p < 0) throw InvalidInputError("diagnostic order must be nonnegative");

    const GridSpec grid = g0.grid();
    const EigenvalueMap ev(grid);
    const double h = T / options.steps;

    // Per-mode multipliers of the exact linear flow and the two ETD weights.
    std::vector<double> decay(ev.values().size());
    std::vector<double> w1(ev.values().size());
    std::vector<double> w2(ev.values().size());
    for (std::size_t i = 0; i < decay.size(); ++i) {
        const double z = -h * ev[i];
        decay[i] = std::exp(z);
        w1[i] = h * phi1(z);
        w2[i] = h * phi2(z);
    }

    const auto eval_f = [&](const SpectralField& u, double t) {
        double max_abs = 0.0;
        SpectralField out = pointwise_apply_dealiased(u, f.eval, &max_abs);
        if (max_abs > options.blowup_threshold)
            throw BlowupError("forward solution magnitude " + std::to_string(max_abs) +
                                  " exceeded the blow-up threshold at t = " + std::to_string(t),
                              t);
        return out;
    };

    Trajectory traj;
    traj.grid = grid;
    traj.p = options.p;
    traj.times.reserve(options.steps + 1);
    traj.states.reserve(options.steps + 1);
    traj.hp_norms.reserve(options.steps + 1);

    SpectralField u = g0;
    traj.times.push_back(0.0);
    traj.hp_norms.push_back(sobolev_norm(u, options.p));
    traj.states.push_back(u);

    for (int step = 0; step < options.steps; ++step) {
        const double t = step * h;
        const SpectralField fn = eval_f(u, t);

        SpectralField stage = u;
        for (std::size_t i = 0; i < stage.size(); ++i)
            stage[i] = decay[i] * u[i] + w1[i] * fn[i];

        const SpectralField fs = eval_f(stage, t + h);
        for (std::size_t i = 0; i < stage.size(); ++i)
            stage[i] += w2[i] * (fs[i] - fn[i]);

        u = std::move(stage);
        const double norm = sobolev_norm(u, options.p);
        if (!std::isfinite(norm))
            throw BlowupError("forward solution became non-finite at t = " + std::to_string(t + h),
                              t + h);
        traj.times.push_back((step + 1) * h);
        traj.hp_norms.push_back(norm);
        traj.states.push_back(u);
    }
    traj.times.back() = T;
    return traj;
}

double self_convergence_order(const SpectralField& g0, const Nonlinearity& f, double T,
                              const EvolveOptions& options) {
    EvolveOptions opt = options;
    const SpectralField coarse = evolve(g0, f, T, opt).final_state();
    opt.steps = options.steps * 2;
    const SpectralField medium = evolve(g0, f, T, opt).final_state();
    opt.steps = options.steps * 4;
    const SpectralField fine = evolve(g0, f, T, opt).final_state();

    const double d1 = sobolev_distance(coarse, medium, options.p);
    const double d2 = sobolev_distance(medium, fine, options.p);
    const double floor = 1e-14 * std::max(1.0, sobolev_norm(fine, options.p));
    if (d2 <= floor) return std::numeric_limits<double>::infinity();
    return std::log2(d1 / d2);
}

std::vector<std::pair<double, double>> gevrey_profile(const Trajectory& traj, int p) {
    std::vector<std::pair<double, double>> profile;
    profile.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        profile.emplace_back(traj.times[i], gevrey_norm(traj.states[i], traj.times[i], p));
    return profile;
}

} // namespace retrodiff
