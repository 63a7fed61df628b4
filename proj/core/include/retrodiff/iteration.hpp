#pragma once

#include "retrodiff/backward.hpp"

#include <iosfwd>
#include <optional>

namespace retrodiff {

/// gamma(t, lambda) = integral_t^T e^{(s-t) lambda} ds = (e^{(T-t) lambda} - 1)/lambda.
double gamma_integral(double t, double T, double lambda);

/// Upper envelope over the retained band: (e^{(T-t) C_eps} - 1)/C_eps.
double gamma_bar(double t, double T, double c_eps);

/// How the stabilization constant is picked.
enum class KRule : std::uint8_t {
    Paper,     // max(gamma_bar(t_n) L1, e^{T C_eps})
    GammaOnly, // gamma_bar(t_n) L1 only; probes the necessity of the e^{T C_eps} term
};

/// Stabilization constant for node time t_n.  Needs the law's
/// non-degeneracy constants; throws InvalidInputError when absent.
/// With the Paper rule the e^{T C_eps} term usually dominates, which makes
/// the contraction factor K/(K+1) close to 1 for large C_eps; GammaOnly is
/// the experimental alternative.
double choose_K(double t_n, const RegularizationPlan& plan, const Nonlinearity& f,
                KRule rule = KRule::Paper);

struct SchemeOptions {
    int node_count = 4; // N; nodes t_n = T - n*omega, omega = T/N
    int sweeps = 64;    // R_max
    KRule k_rule = KRule::Paper;
    std::optional<double> k_override; // explicit K for experiments
    /// Processing order of the node indices 0..N-1 (empty = natural).  Nodes
    /// are mutually independent, so any permutation yields identical bits.
    std::vector<int> node_order;
};

/// Full record of the damped fixed-point scheme
///   (K+1) u^{r+1,n} = K u^{r,n} + e^{(T-t_n) lambda} g - gamma(t_n, lambda) Fhat_M(u^{r,n})
/// per retained mode, with u^{0,n} = 0 and the node n = 0 pinned to the
/// masked data.  Nodes are mutually independent; sweeps within a node are
/// sequential.  Built by a single writer, read-only afterwards.
struct SchemeState {
    RegularizationPlan plan;
    int node_count = 0;
    double omega = 0.0;
    std::vector<double> nodes;    // t_n for n = 1..N
    std::vector<double> k_values; // K per node
    SpectralField data;           // masked g_T^eps (the r-independent node 0)

    /// iterates[n][r] for r = 0..sweeps; cesaro_sums[n][r] = sum_{s<=r} iterates[n][s].
    std::vector<std::vector<SpectralField>> iterates;
    std::vector<std::vector<SpectralField>> cesaro_sums;
    /// diff_norms[n][r-1] = |u^{r,n} - u^{r-1,n}|_{H^p}; ratios are successive quotients.
    std::vector<std::vector<double>> diff_norms;
    std::vector<std::vector<double>> ratios;

    double mu_bar(std::size_t node_index) const {
        return k_values[node_index] / (k_values[node_index] + 1.0);
    }
};

/// Runs the scheme.  Throws DivergenceError when a node's sweep ratio
/// exceeds 1 three times in a row (reports K and gamma_bar*L1), and the
/// usual overflow guard errors.
SchemeState iterate(const SpectralField& gT_eps, const Nonlinearity& f,
                    const RegularizationPlan& plan, const SchemeOptions& options = {});

/// Cesaro mean w^{R,n} = (1/R) sum_{r=0}^{R} u^{r,n}.  The sum carries R+1
/// terms against the 1/R prefactor, exactly as the source scheme defines it,
/// so averaging R copies of v yields ((R+1)/R) v.
SpectralField cesaro_mean(const SchemeState& state, int R, int node_index);

struct NodeConvergence {
    double t = 0.0;
    double K = 0.0;
    double mu_bar = 0.0;
    std::vector<double> errors;        // |u^{r,n} - u_ref(t_n)|_{H^p}, r = 0..R
    std::vector<double> cesaro_errors; // |w^{R,n} - u_ref(t_n)|_{H^p}, R = 1..sweeps
    std::vector<double> ratios;        // per-sweep difference quotients
    double fitted_ratio = 0.0;         // geometric ratio fitted on the decaying range
};

struct IterationReport {
    std::vector<NodeConvergence> nodes;
};

/// Compares the scheme against a Picard reference computed on the same plan;
/// every t_n must be a node of the reference block.
IterationReport convergence_report(const SchemeState& state, const BackwardSolution& reference);

/// Tabular text: one "r n error ratio cesaro_error" row per sweep and node.
void write_report(std::ostream& out, const IterationReport& report);

} // namespace retrodiff
