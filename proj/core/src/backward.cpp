#include "retrodiff/backward.hpp"

#include "retrodiff/dealias.hpp"
#include "retrodiff/errors.hpp"

#include <cmath>
#include <string>

namespace retrodiff {

namespace {

constexpr double kExponentGuard = 700.0;

std::vector<std::size_t> masked_indices(const RegularizationPlan& plan) {
    std::vector<std::size_t> idx;
    idx.reserve(plan.mask_size);
    for (std::size_t i = 0; i < plan.mode_mask.size(); ++i)
        if (plan.mode_mask[i]) idx.push_back(i);
    return idx;
}

SpectralField masked(const SpectralField& v, const RegularizationPlan& plan) {
    SpectralField out = v;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!plan.mode_mask[i]) out[i] = 0.0;
    return out;
}

} // namespace

const SpectralField& BackwardSolution::state_at(double t) const {
    const double tol = 1e-12 * std::max(1.0, times.back());
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= tol) return states[i];
    throw InvalidInputError("time " + std::to_string(t) + " is not a backward node");
}

BackwardSolution solve_backward(const SpectralField& gT_eps, const Nonlinearity& f,
                                const RegularizationPlan& plan, const PicardOptions& options) {
    if (!(gT_eps.grid() == plan.grid))
        throw InvalidInputError("data grid does not match the plan grid");
    if (options.quad_nodes < 4) throw InvalidInputError("need at least 4 quadrature nodes");
    if (!(options.t_min >= 0.0 && options.t_min < plan.T))
        throw InvalidInputError("block start must lie in [0, T)");
    if ((plan.T - options.t_min) * plan.c_eps() > kExponentGuard)
        throw OverflowGuardError("(T - t_min) * C_eps exceeds the exponent guard");

    const Nonlinearity f_used =
        (plan.clamped() && std::isfinite(plan.m_eps)) ? clamp(f, plan.m_eps) : f;

    const EigenvalueMap ev(plan.grid);
    const std::vector<std::size_t> mask = masked_indices(plan);
    const SpectralField g = masked(gT_eps, plan);

    const int q = options.quad_nodes;
    const double h = (plan.T - options.t_min) / (q - 1);

    BackwardSolution sol;
    sol.plan = plan;
    sol.times.resize(q);
    for (int k = 0; k < q; ++k) sol.times[k] = options.t_min + k * h;
    sol.times.back() = plan.T;

    // exp_table[d][i] = exp(d*h*lambda) for the d-step kernel on the mask.
    std::vector<std::vector<double>> exp_table(q, std::vector<double>(mask.size()));
    for (int d = 0; d < q; ++d)
        for (std::size_t i = 0; i < mask.size(); ++i)
            exp_table[d][i] = std::exp(d * h * ev[mask[i]]);

    // Pure linear term e^{(T-t_k) lambda} g, per node: also the first iterate.
    std::vector<SpectralField> linear(q, SpectralField::zero(plan.grid));
    for (int k = 0; k < q; ++k)
        for (std::size_t i = 0; i < mask.size(); ++i)
            linear[k][mask[i]] = exp_table[q - 1 - k][i] * g[mask[i]];

    std::vector<SpectralField> u = linear;
    std::vector<SpectralField> fhat(q, SpectralField::zero(plan.grid));

    sol.status = PicardStatus::MaxIterations;
    double prev_block = std::numeric_limits<double>::infinity();
    double iterate_sup = 0.0; // max |u| seen, sizes the Lipschitz diagnostic
    int growth_streak = 0;

    for (int iter = 0; iter < options.max_iter; ++iter) {
        for (int k = 0; k < q; ++k) {
            double node_sup = 0.0;
            fhat[k] = masked(pointwise_apply_dealiased(u[k], f_used.eval, &node_sup), plan);
            iterate_sup = std::max(iterate_sup, node_sup);
        }

        std::vector<double> node_residuals(q, 0.0);
        double block = 0.0;
        std::vector<SpectralField> next(q, SpectralField::zero(plan.grid));
        for (int k = 0; k < q; ++k) {
            SpectralField& target = next[k];
            for (std::size_t i = 0; i < mask.size(); ++i) {
                std::complex<double> integral = 0.0;
                for (int m = k; m < q; ++m) {
                    const double weight = (m == k || m == q - 1) ? 0.5 * h : h;
                    integral += weight * exp_table[m - k][i] * fhat[m][mask[i]];
                }
                if (k == q - 1) integral = 0.0; // empty integration range
                target[mask[i]] = linear[k][mask[i]] - integral;
            }
            node_residuals[k] = sobolev_distance(target, u[k], plan.p);
            block = std::max(block, node_residuals[k]);
        }
        sol.picard_residuals.push_back(std::move(node_residuals));
        u = std::move(next);

        const double lip = std::isfinite(plan.m_eps) && plan.clamped()
                               ? f.lipschitz_bound(plan.m_eps)
                               : f_used.lipschitz_bound(iterate_sup);
        const double gamma_bar_tmin =
            (std::exp((plan.T - options.t_min) * plan.c_eps()) - 1.0) / plan.c_eps();
        if (!std::isfinite(block))
            throw DivergenceError(
                "picard sweep produced a non-finite residual; estimated "
                "Lipschitz-amplification product L*gamma_bar(t_min) = " +
                std::to_string(lip * gamma_bar_tmin));
        if (block > prev_block) {
            if (++growth_streak >= 3)
                throw DivergenceError(
                    "picard iteration diverges: residual grew 3 sweeps in a row; "
                    "estimated Lipschitz-amplification product L*gamma_bar(t_min) = " +
                    std::to_string(lip * gamma_bar_tmin));
        } else {
            growth_streak = 0;
        }
        prev_block = block;

        if (block <= options.tol) {
            sol.status = PicardStatus::Converged;
            break;
        }
    }

    sol.states = std::move(u);
    return sol;
}

StabilityReport stability_gap(const BackwardSolution& u1, const BackwardSolution& u2, double t,
                              const SpectralField& g1, const SpectralField& g2) {
    if (plan_to_kv(u1.plan) != plan_to_kv(u2.plan))
        throw InvalidInputError("stability probe needs both solutions on the same plan");
    StabilityReport report;
    report.exponent = predicted_rate_exponent(t, u1.plan.T, u1.plan.p, u1.plan.beta);
    report.data_gap = sobolev_distance(g1, g2, 0);
    if (report.data_gap == 0.0)
        throw InvalidInputError("stability probe is undefined for identical data");
    report.solution_gap = sobolev_distance(u1.state_at(t), u2.state_at(t), u1.plan.p);
    report.ratio = report.solution_gap / std::pow(report.data_gap, report.exponent);
    return report;
}

} // namespace retrodiff
