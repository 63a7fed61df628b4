#include "retrodiff/nonlinearity.hpp"

#include "retrodiff/errors.hpp"

#include <cmath>

namespace retrodiff {

namespace {

double param(const std::map<std::string, double>& params, const std::string& key,
             std::optional<double> fallback = std::nullopt) {
    auto it = params.find(key);
    if (it != params.end()) return it->second;
    if (fallback) return *fallback;
    throw InvalidInputError("missing nonlinearity parameter '" + key + "'");
}

int int_param(const std::map<std::string, double>& params, const std::string& key) {
    const double v = param(params, key);
    const int n = static_cast<int>(std::lround(v));
    if (std::abs(v - n) > 1e-12 || n < 1)
        throw InvalidInputError("parameter '" + key + "' must be a positive integer");
    return n;
}

double ipow(double base, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= base;
    return r;
}

Nonlinearity von_bertalanffy(const std::map<std::string, double>& params) {
    const double a = param(params, "a");
    const double b = param(params, "b");
    const int N = int_param(params, "N");
    Nonlinearity f;
    f.id = "von_bertalanffy";
    f.params = {{"a", a}, {"b", b}, {"N", static_cast<double>(N)}};
    f.eval = [a, b, N](double w) { return a * w - b * ipow(w, N + 1); };
    f.deriv = [a, b, N](double w) { return a - b * (N + 1) * ipow(w, N); };
    f.lipschitz_bound = [a, b, N](double M) { return std::abs(a) + std::abs(b) * (N + 1) * ipow(M, N); };
    f.nondegeneracy = [](double) { return std::nullopt; };
    return f;
}

Nonlinearity gompertz(const std::map<std::string, double>& params) {
    const double a = param(params, "a");
    const double b = param(params, "b");
    // Lower edge of the trusted interval; 1/e keeps 1 + log(w) >= 0 so the
    // printed L(M) = |a| + |b| M dominates |F'| there.
    const double u_min = param(params, "u_min", std::exp(-1.0));
    if (!(u_min > 0.0)) throw InvalidInputError("gompertz u_min must be positive");
    Nonlinearity f;
    f.id = "gompertz";
    f.params = {{"a", a}, {"b", b}, {"u_min", u_min}};
    f.eval = [a, b](double w) {
        if (w <= 0.0) throw InvalidInputError("gompertz law evaluated at w <= 0");
        return a * w - b * w * std::log(w);
    };
    f.deriv = [a, b](double w) {
        if (w <= 0.0) throw InvalidInputError("gompertz law evaluated at w <= 0");
        return a - b * (1.0 + std::log(w));
    };
    f.lipschitz_bound = [a, b](double M) { return std::abs(a) + std::abs(b) * M; };
    f.nondegeneracy = [](double) { return std::nullopt; };
    f.eval_domain_lo = 0.0;
    f.eval_domain_open = true;
    f.lipschitz_domain_lo = u_min;
    return f;
}

Nonlinearity de_pillis_radunskaya(const std::map<std::string, double>& params) {
    const double a = param(params, "a");
    const double b = param(params, "b");
    const int N = int_param(params, "N");
    if (b == 0.0) throw InvalidInputError("de_pillis_radunskaya needs b != 0");
    Nonlinearity f;
    f.id = "de_pillis_radunskaya";
    f.params = {{"a", a}, {"b", b}, {"N", static_cast<double>(N)}};
    const bool odd = (N % 2 == 1);
    f.eval = [a, b, N](double w) { return a * ipow(w, N) / (b + ipow(w, N)); };
    f.deriv = [a, b, N](double w) {
        const double wn = ipow(w, N);
        const double den = (b + wn) * (b + wn);
        return a * N * ipow(w, N - 1) * b / den;
    };
    f.lipschitz_bound = [a, b, N](double M) { return std::abs(a / b) * N * ipow(M, N - 1); };
    f.nondegeneracy = [](double) { return std::nullopt; };
    if (odd) {
        // N odd has a pole at w = -b^(1/N); keep the fraction rate on
        // nonnegative arguments, where the printed bound holds.
        f.eval_domain_lo = -std::pow(std::abs(b), 1.0 / N);
        f.eval_domain_open = true;
        f.lipschitz_domain_lo = 0.0;
    }
    return f;
}

Nonlinearity arrhenius(const std::map<std::string, double>& params) {
    const double a = param(params, "a");
    Nonlinearity f;
    f.id = "arrhenius";
    f.params = {{"a", a}};
    f.eval = [a](double w) { return std::exp(a * w); };
    f.deriv = [a](double w) { return a * std::exp(a * w); };
    f.lipschitz_bound = [a](double M) { return a < 0.0 ? std::abs(a) : a * std::exp(a * M); };
    f.nondegeneracy = [](double) { return std::nullopt; };
    // The a < 0 constant |a| presumes nonnegative arguments; |F'| = |a| e^{aw}
    // grows without bound for w < 0.
    if (a < 0.0) f.lipschitz_domain_lo = 0.0;
    return f;
}

Nonlinearity budworm(const std::map<std::string, double>&) {
    Nonlinearity f;
    f.id = "budworm";
    f.eval = [](double w) { return w * (1.0 - w) - w * w / (1.0 + w * w); };
    f.deriv = [](double w) {
        const double den = (1.0 + w * w) * (1.0 + w * w);
        return 1.0 - 2.0 * w - 2.0 * w / den;
    };
    f.lipschitz_bound = [](double M) { return 1.0 + 4.0 * M; };
    f.nondegeneracy = [](double) { return std::nullopt; };
    return f;
}

Nonlinearity michaelis_menten(const std::map<std::string, double>& params) {
    const double a = param(params, "a");
    const double b = param(params, "b");
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidInputError("michaelis_menten needs a, b > 0");
    Nonlinearity f;
    f.id = "michaelis_menten";
    f.params = {{"a", a}, {"b", b}};
    f.eval = [a, b](double w) {
        if (w <= -b) throw InvalidInputError("michaelis_menten law evaluated at w <= -b");
        return a * w / (b + w);
    };
    f.deriv = [a, b](double w) {
        if (w <= -b) throw InvalidInputError("michaelis_menten law evaluated at w <= -b");
        return a * b / ((b + w) * (b + w));
    };
    f.lipschitz_bound = [a, b](double) { return a / b; };
    f.nondegeneracy = [a, b](double M) -> std::optional<NondegeneracyBounds> {
        return NondegeneracyBounds{a * b / ((b + M) * (b + M)), a / b};
    };
    f.eval_domain_lo = -b;
    f.eval_domain_open = true;
    f.lipschitz_domain_lo = 0.0;
    return f;
}

} // namespace

Nonlinearity catalog(const std::string& name, const std::map<std::string, double>& params) {
    if (name == "von_bertalanffy") return von_bertalanffy(params);
    if (name == "gompertz") return gompertz(params);
    if (name == "de_pillis_radunskaya") return de_pillis_radunskaya(params);
    if (name == "arrhenius") return arrhenius(params);
    if (name == "budworm") return budworm(params);
    if (name == "michaelis_menten") return michaelis_menten(params);
    throw InvalidInputError("unknown nonlinearity '" + name + "'");
}

Nonlinearity clamp(const Nonlinearity& f, double M) {
    if (!(M > 0.0)) throw InvalidInputError("clamp level must be positive");
    if (f.eval_domain_lo > -M || (f.eval_domain_open && f.eval_domain_lo == -M))
        throw InvalidInputError("clamp range [-M, M] crosses the domain of '" + f.id + "'");

    Nonlinearity out = f;
    out.id = f.id + "_clamped";
    out.clamp_level = M;
    const auto base_eval = f.eval;
    const auto base_deriv = f.deriv;
    const auto base_lip = f.lipschitz_bound;
    out.eval = [base_eval, M](double w) {
        if (w >= M) return base_eval(M);
        if (w <= -M) return base_eval(-M);
        return base_eval(w);
    };
    out.deriv = [base_deriv, M](double w) {
        if (w > M || w < -M) return 0.0;
        return base_deriv(w);
    };
    // The clamped law never sees arguments beyond the clamp level.
    out.lipschitz_bound = [base_lip, M](double Mp) { return base_lip(std::min(Mp, M)); };
    out.eval_domain_lo = -std::numeric_limits<double>::infinity();
    out.eval_domain_open = false;
    return out;
}

double choose_M_eps(const Nonlinearity& f, double eps, double beta, double t, double T) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInputError("noise level must lie in (0,1)");
    if (!(beta > 0.0 && beta < 0.5)) throw InvalidInputError("beta must lie in (0, 1/2)");
    if (!(t > 0.0 && t < T)) throw InvalidInputError("need 0 < t < T");

    const double bound = beta * std::log(1.0 / eps) / (2.0 * (T - t));
    const double l_zero = f.lipschitz_bound(0.0);
    if (l_zero * l_zero > bound)
        throw InfeasibleError("clamp level infeasible: L(0)^2 = " + std::to_string(l_zero * l_zero) +
                              " exceeds the admissible bound " + std::to_string(bound) +
                              " (noise level too large for this t)");

    // Find a bracket; if L never crosses the bound the law needs no clamp.
    double hi = 1.0;
    bool bracketed = false;
    for (int i = 0; i < 200; ++i) {
        const double l = f.lipschitz_bound(hi);
        if (l * l > bound) {
            bracketed = true;
            break;
        }
        hi *= 2.0;
        if (!std::isfinite(hi)) break;
    }
    if (!bracketed) return kNoClampNeeded;

    double lo = 0.0;
    for (int i = 0; i < 200 && (hi - lo) > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double l = f.lipschitz_bound(mid);
        if (l * l > bound)
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

} // namespace retrodiff
