#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>

namespace retrodiff {

/// Constants L0, L1 with 0 < L0 <= sup_{|w|<=M} F'(w) <= L1.
struct NondegeneracyBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// A reaction law F bundled with its derivative, its Lipschitz bound
/// M -> L(M) on |w| <= M, and (when available) non-degeneracy constants.
///
/// Laws with a restricted argument range carry two intervals:
///   * eval_domain_lo / eval_domain_open: where F may be evaluated at all
///     (Gompertz needs w > 0; Michaelis-Menten needs w > -b).
///   * lipschitz_domain_lo: where the catalog L(M) actually dominates |F'|
///     (Michaelis-Menten's printed a/b assumes nonnegative concentrations;
///     Gompertz is restricted away from the logarithmic singularity).
/// Sampling-based checks draw their pairs from the Lipschitz interval.
struct Nonlinearity {
    std::string id;
    std::map<std::string, double> params;

    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    std::function<double(double)> lipschitz_bound; // M -> L(M)
    std::function<std::optional<NondegeneracyBounds>(double)> nondegeneracy; // M -> (L0, L1)

    double eval_domain_lo = -std::numeric_limits<double>::infinity();
    bool eval_domain_open = false;
    double lipschitz_domain_lo = -std::numeric_limits<double>::infinity();

    /// Set when this law is a clamped variant F_M.
    std::optional<double> clamp_level;

    double operator()(double w) const { return eval(w); }
};

/// Builds a catalog law.  Known names: von_bertalanffy (a, b, N),
/// gompertz (a, b[, u_min]), de_pillis_radunskaya (a, b, N),
/// arrhenius (a), budworm (no parameters), michaelis_menten (a, b).
/// Throws InvalidInputError for unknown names or invalid parameters.
Nonlinearity catalog(const std::string& name, const std::map<std::string, double>& params = {});

/// Cut-off variant F_M: F(M) above M, F(w) on |w| <= M, F(-M) below -M.
/// Globally Lipschitz with constant L(M).  Throws InvalidInputError when
/// [-M, M] crosses the law's evaluation domain (Gompertz always does).
Nonlinearity clamp(const Nonlinearity& f, double M);

/// Sentinel returned by choose_M_eps when L does not grow with M.
inline constexpr double kNoClampNeeded = std::numeric_limits<double>::infinity();

/// Largest clamp level M with L(M)^2 <= beta * log(1/eps) / (2 (T - t)),
/// found by bisection on the monotone L.  Returns kNoClampNeeded when L is
/// constant in M, and throws InfeasibleError when even L(0)^2 exceeds the
/// bound (noise level too large for this evaluation time).
double choose_M_eps(const Nonlinearity& f, double eps, double beta, double t, double T);

} // namespace retrodiff
