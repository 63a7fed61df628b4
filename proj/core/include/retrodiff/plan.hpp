#pragma once

#include "retrodiff/field.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace retrodiff {

/// Which form of the cut-off rule produced C_eps.
enum class CutoffBranch : std::uint8_t {
    GlobalLipschitz, // log(e^{p/2 + (t-T) L^2} B / eps^{1/2})
    Clamped,         // log(e^{p/2} B / eps^{1/2 - beta})
};

const char* to_string(CutoffBranch branch);

/// Inputs of the cut-off rule.
struct CutoffRule {
    double eps = 0.0;          // noise level, in (0,1)
    int p = 1;                 // Sobolev order
    double T = 1.0;            // observation horizon
    double t_star = 0.5;       // evaluation time in (0,T)
    double gevrey_bound = 1.0; // |u(.,t)|_{G_t^{p/2}} (oracle or prescribed)
    double scale = 1.0;        // the free constant C of the rule
    std::optional<double> beta;          // present -> clamped branch
    double lipschitz = 0.0;              // L for the global branch factor e^{(t-T) L^2}
};

struct CutoffChoice {
    double c_eps = 1.0;
    CutoffBranch branch = CutoffBranch::GlobalLipschitz;
    bool floored = false; // formula value fell below the floor of 1
    bool capped = false;  // clipped by the overflow guard T*C_eps <= 700
};

/// C_eps = (scale / (T + t + p/2)) * log(arg) with the branch-dependent
/// argument, floored at 1 and capped at 700/T.  Throws InfeasibleError when
/// the argument is <= 1 (noise too large relative to the bound).
CutoffChoice select_C_eps(const CutoffRule& rule);

/// All eps-dependent choices for one backward solve, plus the mode mask the
/// cut-off induces.  Immutable after construction.
struct RegularizationPlan {
    GridSpec grid;
    double eps = 0.0;
    int p = 1;
    double T = 1.0;
    double t_star = 0.5;
    std::optional<double> beta;
    double gevrey_bound = 1.0;
    double scale = 1.0;
    double lipschitz = 0.0;
    CutoffChoice cutoff;
    double m_eps = 0.0; // clamp level; +infinity means no clamp needed

    std::vector<std::uint8_t> mode_mask; // 1 where lambda_j <= C_eps
    std::size_t mask_size = 0;

    double c_eps() const { return cutoff.c_eps; }
    bool clamped() const { return beta.has_value(); }
};

/// Assembles a plan: selects C_eps, picks M_eps through the clamp rule when
/// beta is present and f is supplied, and materializes the mode mask.
/// Enforces the overflow guard T*C_eps <= 700.
struct Nonlinearity;
RegularizationPlan make_plan(const GridSpec& grid, const CutoffRule& rule,
                             const Nonlinearity* f = nullptr);

/// Plan with an explicitly pinned cut-off level, bypassing the selection
/// rule but keeping every guard and the induced mask.  Used by experiments
/// probing a fixed band and by tests.
RegularizationPlan pinned_plan(const GridSpec& grid, double T, double t_star, int p, double c_eps,
                               double eps = 1e-6, std::optional<double> beta = std::nullopt,
                               double m_eps = std::numeric_limits<double>::infinity());

/// Flat key-value rendering embedded in experiment manifests.  Doubles are
/// written with 17 significant digits so reload is bit-exact.
std::map<std::string, std::string> plan_to_kv(const RegularizationPlan& plan);
RegularizationPlan plan_from_kv(const std::map<std::string, std::string>& kv);

/// Root and admissible interval of the time-selection problem
///   eps^{t (1-2 beta)/(T + t + p/2)} = t.
struct TimeChoice {
    double t_eps = 0.0;
    double interval_lo = 0.0; // closed-form endpoints as printed; lo < 0 < hi
    double interval_hi = 0.0;
    double residual = 0.0;    // |phi(t_eps)| after bisection
};

/// Bisection root of phi(t) = eps^{t(1-2beta)/(T+t+p/2)} - t on (0,T) to
/// 1e-12, with the closed-form admissible interval endpoints
///   (-b -/+ sqrt(b^2 + 4(b+1)(1 - log eps))) / (2((1-2beta) log eps - 1)),
/// b = T + p/2 - 1.  Throws InfeasibleError when phi has no sign change.
TimeChoice select_t_eps(double eps, double T, int p, std::optional<double> beta = std::nullopt);

/// Hoelder exponent t(1-2beta)/(T+t+p/2) of the predicted rate for t > 0.
double predicted_rate_exponent(double t, double T, int p, std::optional<double> beta = std::nullopt);

/// The t = 0 logarithmic bound shape (with unit constant):
///   (T+p/2) / (sqrt((T+p/2+1)^2 + 4(T+p/2)(1-2beta) log(1/eps)) + T+p/2-1).
double t_zero_bound(double eps, double T, int p, std::optional<double> beta = std::nullopt);

} // namespace retrodiff
