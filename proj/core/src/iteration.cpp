#include "retrodiff/iteration.hpp"

#include "retrodiff/dealias.hpp"
#include "retrodiff/errors.hpp"
#include "retrodiff/field_io.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace retrodiff {

namespace {

SpectralField masked(const SpectralField& v, const RegularizationPlan& plan) {
    SpectralField out = v;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!plan.mode_mask[i]) out[i] = 0.0;
    return out;
}

double fit_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

double gamma_integral(double t, double T, double lambda) {
    if (!(lambda >= 1.0)) throw InvalidInputError("gamma needs lambda >= 1");
    if (!(t >= 0.0 && t <= T)) throw InvalidInputError("gamma needs 0 <= t <= T");
    if ((T - t) * lambda > 700.0)
        throw OverflowGuardError("(T-t)*lambda exceeds the exponent guard in gamma");
    return std::expm1((T - t) * lambda) / lambda;
}

double gamma_bar(double t, double T, double c_eps) {
    if (!(c_eps >= 1.0)) throw InvalidInputError("gamma_bar needs C_eps >= 1");
    if (!(t >= 0.0 && t <= T)) throw InvalidInputError("gamma_bar needs 0 <= t <= T");
    if ((T - t) * c_eps > 700.0)
        throw OverflowGuardError("(T-t)*C_eps exceeds the exponent guard in gamma_bar");
    return std::expm1((T - t) * c_eps) / c_eps;
}

double choose_K(double t_n, const RegularizationPlan& plan, const Nonlinearity& f, KRule rule) {
    const double m_query = std::isfinite(plan.m_eps) ? plan.m_eps : 1.0;
    const auto bounds = f.nondegeneracy(m_query);
    if (!bounds)
        throw InvalidInputError("law '" + f.id + "' carries no non-degeneracy constants; "
                                "the stabilized scheme needs (L0, L1)");
    const double gamma_term = gamma_bar(t_n, plan.T, plan.c_eps()) * bounds->upper;
    if (rule == KRule::GammaOnly) return gamma_term;
    if (plan.T * plan.c_eps() > 700.0)
        throw OverflowGuardError("e^{T C_eps} exceeds the exponent guard in choose_K");
    return std::max(gamma_term, std::exp(plan.T * plan.c_eps()));
}

SchemeState iterate(const SpectralField& gT_eps, const Nonlinearity& f,
                    const RegularizationPlan& plan, const SchemeOptions& options) {
    if (!(gT_eps.grid() == plan.grid))
        throw InvalidInputError("data grid does not match the plan grid");
    if (options.node_count < 1) throw InvalidInputError("need at least one node");
    if (options.sweeps < 2) throw InvalidInputError("need at least two sweeps");

    const Nonlinearity f_used =
        (plan.clamped() && std::isfinite(plan.m_eps)) ? clamp(f, plan.m_eps) : f;

    SchemeState state;
    state.plan = plan;
    state.node_count = options.node_count;
    state.omega = plan.T / options.node_count;
    state.data = masked(gT_eps, plan);

    const EigenvalueMap ev(plan.grid);
    for (int n = 1; n <= options.node_count; ++n)
        state.nodes.push_back(plan.T - n * state.omega);
    if (state.nodes.back() < 0.0) state.nodes.back() = 0.0; // t_N = T - N*omega exactly

    state.iterates.resize(state.nodes.size());
    state.cesaro_sums.resize(state.nodes.size());
    state.diff_norms.resize(state.nodes.size());
    state.ratios.resize(state.nodes.size());
    state.k_values.resize(state.nodes.size());

    std::vector<int> order = options.node_order;
    if (order.empty())
        for (std::size_t i = 0; i < state.nodes.size(); ++i) order.push_back(static_cast<int>(i));
    if (order.size() != state.nodes.size())
        throw InvalidInputError("node order must cover every node exactly once");

    // Nodes are independent; any processing order gives the same bits.
    for (int node_index : order) {
        if (node_index < 0 || node_index >= static_cast<int>(state.nodes.size()))
            throw InvalidInputError("node order entry out of range");
        const std::size_t ni = static_cast<std::size_t>(node_index);
        const double t_n = state.nodes[ni];
        const double K = options.k_override ? *options.k_override
                                            : choose_K(t_n, plan, f, options.k_rule);
        if (!(K > 0.0)) throw InvalidInputError("stabilization constant must be positive");
        state.k_values[ni] = K;

        const double m_query = std::isfinite(plan.m_eps) ? plan.m_eps : 1.0;
        const auto bounds = f.nondegeneracy(m_query);
        const double gamma_l1 =
            bounds ? gamma_bar(t_n, plan.T, plan.c_eps()) * bounds->upper : 0.0;

        // Per-mode ingredients: data kernel e^{(T-t_n) lambda} and gamma(t_n, lambda).
        SpectralField data_term = SpectralField::zero(plan.grid);
        std::vector<double> gamma_mode(plan.grid.size(), 0.0);
        for (std::size_t i = 0; i < plan.mode_mask.size(); ++i) {
            if (!plan.mode_mask[i]) continue;
            data_term[i] = std::exp((plan.T - t_n) * ev[i]) * state.data[i];
            gamma_mode[i] = gamma_integral(t_n, plan.T, ev[i]);
        }

        SpectralField u = SpectralField::zero(plan.grid);
        state.iterates[ni].push_back(u);
        state.cesaro_sums[ni].push_back(u);

        int growth_streak = 0;
        for (int r = 0; r < options.sweeps; ++r) {
            const SpectralField fhat = masked(pointwise_apply_dealiased(u, f_used.eval), plan);
            SpectralField next = SpectralField::zero(plan.grid);
            for (std::size_t i = 0; i < plan.mode_mask.size(); ++i) {
                if (!plan.mode_mask[i]) continue;
                next[i] = (K * u[i] + data_term[i] - gamma_mode[i] * fhat[i]) / (K + 1.0);
            }

            const double diff = sobolev_distance(next, u, plan.p);
            state.diff_norms[ni].push_back(diff);
            const std::size_t count = state.diff_norms[ni].size();
            if (count >= 2) {
                const double prev = state.diff_norms[ni][count - 2];
                const double ratio = prev > 0.0 ? diff / prev : 0.0;
                state.ratios[ni].push_back(ratio);
                if (ratio > 1.0) {
                    if (++growth_streak >= 3)
                        throw DivergenceError(
                            "scheme stopped contracting at t_n = " + std::to_string(t_n) +
                            ": K = " + std::to_string(K) +
                            ", gamma_bar*L1 = " + std::to_string(gamma_l1));
                } else {
                    growth_streak = 0;
                }
            }

            u = next;
            state.iterates[ni].push_back(u);
            state.cesaro_sums[ni].push_back(add(state.cesaro_sums[ni].back(), u));
        }
    }
    return state;
}

SpectralField cesaro_mean(const SchemeState& state, int R, int node_index) {
    if (R < 1) throw InvalidInputError("cesaro mean is undefined for R = 0");
    if (node_index < 0 || node_index >= static_cast<int>(state.nodes.size()))
        throw InvalidInputError("node index out of range");
    if (R >= static_cast<int>(state.cesaro_sums[node_index].size()))
        throw InvalidInputError("cesaro mean requested beyond the stored sweeps");
    return scale(state.cesaro_sums[node_index][R], 1.0 / R);
}

IterationReport convergence_report(const SchemeState& state, const BackwardSolution& reference) {
    if (plan_to_kv(state.plan) != plan_to_kv(reference.plan))
        throw InvalidInputError("scheme and reference were built from different plans");

    IterationReport report;
    for (std::size_t ni = 0; ni < state.nodes.size(); ++ni) {
        NodeConvergence node;
        node.t = state.nodes[ni];
        node.K = state.k_values[ni];
        node.mu_bar = state.mu_bar(ni);
        node.ratios = state.ratios[ni];

        const SpectralField& ref = reference.state_at(node.t); // throws on node mismatch
        for (const SpectralField& it : state.iterates[ni])
            node.errors.push_back(sobolev_distance(it, ref, state.plan.p));
        for (int R = 1; R < static_cast<int>(state.iterates[ni].size()); ++R)
            node.cesaro_errors.push_back(
                sobolev_distance(cesaro_mean(state, R, static_cast<int>(ni)), ref,
                                 state.plan.p));

        // Geometric fit on the decaying range; the tail saturates at the
        // frozen-kernel consistency gap, which the fit must not absorb.
        double floor = node.errors.back();
        for (double e : node.errors) floor = std::min(floor, e);
        std::vector<double> xs, ys;
        for (std::size_t r = 1; r < node.errors.size(); ++r) {
            if (node.errors[r] > 5.0 * floor && node.errors[r] > 0.0) {
                xs.push_back(static_cast<double>(r));
                ys.push_back(std::log(node.errors[r]));
            }
        }
        if (xs.size() >= 3) {
            node.fitted_ratio = std::exp(fit_log_slope(xs, ys));
        } else if (!node.ratios.empty()) {
            double sum = 0.0;
            for (double r : node.ratios) sum += r;
            node.fitted_ratio = sum / node.ratios.size();
        }
        report.nodes.push_back(std::move(node));
    }
    return report;
}

void write_report(std::ostream& out, const IterationReport& report) {
    out << "r n error ratio cesaro_error\n";
    for (std::size_t ni = 0; ni < report.nodes.size(); ++ni) {
        const NodeConvergence& node = report.nodes[ni];
        for (std::size_t r = 0; r < node.errors.size(); ++r) {
            out << r << " " << (ni + 1) << " " << format_double(node.errors[r]) << " ";
            if (r >= 2 && r - 2 < node.ratios.size())
                out << format_double(node.ratios[r - 2]);
            else
                out << "nan";
            out << " ";
            if (r >= 1 && r - 1 < node.cesaro_errors.size())
                out << format_double(node.cesaro_errors[r - 1]);
            else
                out << "nan";
            out << "\n";
        }
    }
}

} // namespace retrodiff
