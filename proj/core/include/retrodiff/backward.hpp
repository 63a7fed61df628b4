#pragma once

#include "retrodiff/field.hpp"
#include "retrodiff/nonlinearity.hpp"
#include "retrodiff/plan.hpp"

#include <vector>

namespace retrodiff {

enum class PicardStatus : std::uint8_t { Converged, MaxIterations };

/// Regularized backward states on a uniform time block [t_min, T].
/// Every state is supported exactly on the plan's mode mask.
struct BackwardSolution {
    RegularizationPlan plan;
    std::vector<double> times; // uniform nodes, times.front() = t_min, back() = T
    std::vector<SpectralField> states;
    /// residuals[k][n]: H^p change of node n's state in Picard sweep k.
    std::vector<std::vector<double>> picard_residuals;
    PicardStatus status = PicardStatus::Converged;

    const SpectralField& state_at(double t) const;
};

struct PicardOptions {
    int quad_nodes = 64;    // nodes of the shared trapezoid/Picard time grid
    double tol = 1e-10;     // stop when the H^p block change drops below this
    int max_iter = 100;
    double t_min = 0.0;     // earliest node of the block; 0 reaches the initial state
};

/// Solves the truncated integral equation per retained mode j and node t:
///   u(t)_j = e^{(T-t) lambda_j} g_j - integral_t^T e^{(s-t) lambda_j} Fhat(u(s))_j ds,
/// with the memory integral approximated by the composite trapezoid rule on
/// the block nodes and the whole space-time block iterated from the pure
/// linear term.  In clamped plans F is replaced by its cut-off variant at
/// M_eps before evaluation.
///
/// Throws DivergenceError when the block residual grows three sweeps in a
/// row (the message reports the Lipschitz-amplification product
/// L * gamma_bar(t_min)), and OverflowGuardError when (T - t_min) * C_eps
/// exceeds the representable exponent window.
BackwardSolution solve_backward(const SpectralField& gT_eps, const Nonlinearity& f,
                                const RegularizationPlan& plan,
                                const PicardOptions& options = {});

/// Empirical conditional-stability probe: compares two backward solutions
/// obtained from data g1 and g2 under the same plan at time t.
struct StabilityReport {
    double exponent = 0.0;  // predicted Hoelder exponent at t
    double data_gap = 0.0;  // |g1 - g2|_{L^2}
    double solution_gap = 0.0; // |u1 - u2|_{H^p}
    double ratio = 0.0;     // solution_gap / data_gap^exponent
};

StabilityReport stability_gap(const BackwardSolution& u1, const BackwardSolution& u2, double t,
                              const SpectralField& g1, const SpectralField& g2);

} // namespace retrodiff
