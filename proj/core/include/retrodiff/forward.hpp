#pragma once

#include "retrodiff/field.hpp"
#include "retrodiff/nonlinearity.hpp"

#include <utility>
#include <vector>

namespace retrodiff {

/// States of u_t + (I - Laplacian) u = F(u) recorded at every step node.
/// Immutable after construction.
struct Trajectory {
    GridSpec grid;
    int p = 1; // smoothness order used for the recorded norms
    std::vector<double> times;
    std::vector<SpectralField> states;
    std::vector<double> hp_norms;

    const SpectralField& initial() const { return states.front(); }
    const SpectralField& final_state() const { return states.back(); }
    double horizon() const { return times.back(); }

    /// State at an exact node time; throws InvalidInputError when t is not a
    /// node (the solver does not interpolate).
    const SpectralField& state_at(double t) const;

    /// Index of the last node with times[i] <= t.
    std::size_t node_at_or_below(double t) const;
};

struct EvolveOptions {
    int steps = 256;
    int p = 1;                      // order for the recorded H^p diagnostics
    double blowup_threshold = 1e6;  // abort when max|u| exceeds this
};

/// Integrates the mild form
///   u(t+h) = e^{-hA} u(t) + integral_0^h e^{-(h-s)A} F(u(t+s)) ds
/// by second-order exponential time differencing: the linear part is the
/// exact per-mode multiplier e^{-h lambda_j}; the nonlinearity is evaluated
/// pseudo-spectrally on the dealiased fine grid.  Throws BlowupError with
/// the failure time when the solution magnitude passes the threshold.
Trajectory evolve(const SpectralField& g0, const Nonlinearity& f, double T,
                  const EvolveOptions& options = {});

/// Observed order from a Richardson triple at steps, 2*steps, 4*steps:
/// log2(|u_h - u_{h/2}| / |u_{h/2} - u_{h/4}|) in H^p.  Returns +infinity
/// when the refinement differences are at roundoff (exact integration).
double self_convergence_order(const SpectralField& g0, const Nonlinearity& f, double T,
                              const EvolveOptions& options = {});

/// (t, |u(.,t)|_{G_t^{p/2}}) at each trajectory node; the Gevrey index
/// grows with t exactly as the forward smoothing does.
std::vector<std::pair<double, double>> gevrey_profile(const Trajectory& traj, int p);

} // namespace retrodiff
