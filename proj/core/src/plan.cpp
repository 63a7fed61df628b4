#include "retrodiff/plan.hpp"

#include "retrodiff/errors.hpp"
#include "retrodiff/field_io.hpp"
#include "retrodiff/nonlinearity.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace retrodiff {

namespace {

constexpr double kExponentGuard = 700.0;

void validate_rule(const CutoffRule& rule) {
    if (!(rule.eps > 0.0 && rule.eps < 1.0))
        throw InvalidInputError("noise level must lie in (0,1)");
    if (!(rule.gevrey_bound > 0.0))
        throw InvalidInputError("gevrey bound must be positive");
    if (!(rule.T > 0.0) || !(rule.t_star > 0.0 && rule.t_star < rule.T))
        throw InvalidInputError("need 0 < t < T");
    if (rule.p < 1) throw InvalidInputError("sobolev order must be >= 1");
    if (!(rule.scale > 0.0)) throw InvalidInputError("cut-off constant must be positive");
    if (rule.beta && !(*rule.beta > 0.0 && *rule.beta < 0.5))
        throw InvalidInputError("beta must lie in (0, 1/2)");
}

double parse_double(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw InvalidInputError("plan block misses key '" + key + "'");
    return std::strtod(it->second.c_str(), nullptr);
}

int parse_int(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw InvalidInputError("plan block misses key '" + key + "'");
    return std::atoi(it->second.c_str());
}

} // namespace

const char* to_string(CutoffBranch branch) {
    return branch == CutoffBranch::GlobalLipschitz ? "global_lipschitz" : "clamped";
}

CutoffChoice select_C_eps(const CutoffRule& rule) {
    validate_rule(rule);
    const double denom = rule.T + rule.t_star + 0.5 * rule.p;

    // log of the branch argument, assembled in log space to dodge overflow.
    double log_arg = 0.5 * rule.p + std::log(rule.gevrey_bound);
    CutoffChoice choice;
    if (rule.beta) {
        choice.branch = CutoffBranch::Clamped;
        log_arg += (0.5 - *rule.beta) * std::log(1.0 / rule.eps);
    } else {
        choice.branch = CutoffBranch::GlobalLipschitz;
        log_arg += (rule.t_star - rule.T) * rule.lipschitz * rule.lipschitz;
        log_arg += 0.5 * std::log(1.0 / rule.eps);
    }

    if (!(log_arg > 0.0))
        throw InfeasibleError("cut-off rule infeasible: log argument is " +
                              std::to_string(std::exp(log_arg)) +
                              " <= 1 (noise level too large relative to the bound)");

    double c_eps = rule.scale / denom * log_arg;
    if (c_eps < 1.0) {
        c_eps = 1.0;
        choice.floored = true;
    }
    const double cap = kExponentGuard / rule.T;
    if (c_eps > cap) {
        c_eps = cap;
        choice.capped = true;
    }
    choice.c_eps = c_eps;
    return choice;
}

RegularizationPlan make_plan(const GridSpec& grid, const CutoffRule& rule, const Nonlinearity* f) {
    validate(grid);
    RegularizationPlan plan;
    plan.grid = grid;
    plan.eps = rule.eps;
    plan.p = rule.p;
    plan.T = rule.T;
    plan.t_star = rule.t_star;
    plan.beta = rule.beta;
    plan.gevrey_bound = rule.gevrey_bound;
    plan.scale = rule.scale;
    plan.lipschitz = rule.lipschitz;
    plan.cutoff = select_C_eps(rule);

    if (plan.T * plan.cutoff.c_eps > kExponentGuard)
        throw OverflowGuardError("plan rejected: T*C_eps exceeds the exponent guard");

    if (rule.beta) {
        if (!f)
            throw InvalidInputError("clamped plans need the nonlinearity to size the clamp level");
        plan.m_eps = choose_M_eps(*f, rule.eps, *rule.beta, rule.t_star, rule.T);
    } else {
        plan.m_eps = kNoClampNeeded;
    }

    const EigenvalueMap ev(grid);
    plan.mode_mask.assign(grid.size(), 0);
    for (std::size_t i = 0; i < plan.mode_mask.size(); ++i) {
        if (ev[i] <= plan.cutoff.c_eps) {
            plan.mode_mask[i] = 1;
            ++plan.mask_size;
        }
    }
    return plan;
}

RegularizationPlan pinned_plan(const GridSpec& grid, double T, double t_star, int p, double c_eps,
                               double eps, std::optional<double> beta, double m_eps) {
    validate(grid);
    if (!(c_eps >= 1.0)) throw InvalidInputError("pinned cut-off level must be >= 1");
    if (!(T > 0.0) || !(t_star >= 0.0 && t_star < T))
        throw InvalidInputError("need 0 <= t_star < T");
    if (T * c_eps > kExponentGuard)
        throw OverflowGuardError("pinned plan rejected: T*C_eps exceeds the exponent guard");

    RegularizationPlan plan;
    plan.grid = grid;
    plan.eps = eps;
    plan.p = p;
    plan.T = T;
    plan.t_star = t_star;
    plan.beta = beta;
    plan.m_eps = m_eps;
    plan.cutoff.c_eps = c_eps;
    plan.cutoff.branch = beta ? CutoffBranch::Clamped : CutoffBranch::GlobalLipschitz;

    const EigenvalueMap ev(grid);
    plan.mode_mask.assign(grid.size(), 0);
    for (std::size_t i = 0; i < plan.mode_mask.size(); ++i) {
        if (ev[i] <= c_eps) {
            plan.mode_mask[i] = 1;
            ++plan.mask_size;
        }
    }
    return plan;
}

std::map<std::string, std::string> plan_to_kv(const RegularizationPlan& plan) {
    std::map<std::string, std::string> kv;
    kv["grid.d"] = std::to_string(plan.grid.dim);
    kv["grid.ell"] = format_double(plan.grid.ell);
    kv["grid.n"] = std::to_string(plan.grid.n_per_axis);
    kv["eps"] = format_double(plan.eps);
    kv["p"] = std::to_string(plan.p);
    kv["T"] = format_double(plan.T);
    kv["t_star"] = format_double(plan.t_star);
    kv["beta"] = plan.beta ? format_double(*plan.beta) : "none";
    kv["gevrey_bound"] = format_double(plan.gevrey_bound);
    kv["scale"] = format_double(plan.scale);
    kv["lipschitz"] = format_double(plan.lipschitz);
    kv["c_eps"] = format_double(plan.cutoff.c_eps);
    kv["branch"] = to_string(plan.cutoff.branch);
    kv["floored"] = plan.cutoff.floored ? "1" : "0";
    kv["capped"] = plan.cutoff.capped ? "1" : "0";
    kv["m_eps"] = std::isinf(plan.m_eps) ? "inf" : format_double(plan.m_eps);
    kv["mask_size"] = std::to_string(plan.mask_size);
    return kv;
}

RegularizationPlan plan_from_kv(const std::map<std::string, std::string>& kv) {
    RegularizationPlan plan;
    plan.grid.dim = parse_int(kv, "grid.d");
    plan.grid.ell = parse_double(kv, "grid.ell");
    plan.grid.n_per_axis = parse_int(kv, "grid.n");
    validate(plan.grid);
    plan.eps = parse_double(kv, "eps");
    plan.p = parse_int(kv, "p");
    plan.T = parse_double(kv, "T");
    plan.t_star = parse_double(kv, "t_star");
    if (kv.at("beta") != "none") plan.beta = parse_double(kv, "beta");
    plan.gevrey_bound = parse_double(kv, "gevrey_bound");
    plan.scale = parse_double(kv, "scale");
    plan.lipschitz = parse_double(kv, "lipschitz");
    plan.cutoff.c_eps = parse_double(kv, "c_eps");
    plan.cutoff.branch = kv.at("branch") == "clamped" ? CutoffBranch::Clamped
                                                      : CutoffBranch::GlobalLipschitz;
    plan.cutoff.floored = kv.at("floored") == "1";
    plan.cutoff.capped = kv.at("capped") == "1";
    plan.m_eps = kv.at("m_eps") == "inf" ? kNoClampNeeded : parse_double(kv, "m_eps");

    const EigenvalueMap ev(plan.grid);
    plan.mode_mask.assign(plan.grid.size(), 0);
    for (std::size_t i = 0; i < plan.mode_mask.size(); ++i) {
        if (ev[i] <= plan.cutoff.c_eps) {
            plan.mode_mask[i] = 1;
            ++plan.mask_size;
        }
    }
    if (plan.mask_size != static_cast<std::size_t>(parse_int(kv, "mask_size")))
        throw InvalidInputError("plan block mask size does not match the reconstructed mask");
    return plan;
}

TimeChoice select_t_eps(double eps, double T, int p, std::optional<double> beta) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInputError("noise level must lie in (0,1)");
    if (!(T > 0.0)) throw InvalidInputError("horizon must be positive");
    if (p < 1) throw InvalidInputError("sobolev order must be >= 1");
    if (beta && !(*beta > 0.0 && *beta < 0.5))
        throw InvalidInputError("beta must lie in (0, 1/2)");

    const double factor = beta ? (1.0 - 2.0 * *beta) : 1.0;
    const double log_eps = std::log(eps);
    const auto phi = [&](double t) {
        return std::exp(log_eps * factor * t / (T + t + 0.5 * p)) - t;
    };

    double lo = 0.0, hi = T;
    if (!(phi(hi) < 0.0))
        throw InfeasibleError("time-selection problem has no root in (0,T): phi(T) = " +
                              std::to_string(phi(hi)));
    for (int i = 0; i < 200 && (hi - lo) > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (phi(mid) > 0.0 ? lo : hi) = mid;
    }
    TimeChoice choice;
    choice.t_eps = 0.5 * (lo + hi);
    choice.residual = std::abs(phi(choice.t_eps));

    // Closed-form admissible interval; the denominator is negative, so the
    // "-sqrt" endpoint is the positive one.
    const double b = T + 0.5 * p - 1.0;
    const double disc = std::sqrt(b * b + 4.0 * (b + 1.0) * (1.0 - log_eps));
    const double den = 2.0 * (factor * log_eps - 1.0);
    choice.interval_lo = (-b + disc) / den;
    choice.interval_hi = (-b - disc) / den;
    return choice;
}

double predicted_rate_exponent(double t, double T, int p, std::optional<double> beta) {
    if (!(t >= 0.0 && t < T)) throw InvalidInputError("need 0 <= t < T");
    const double factor = beta ? (1.0 - 2.0 * *beta) : 1.0;
    return t * factor / (T + t + 0.5 * p);
}

double t_zero_bound(double eps, double T, int p, std::optional<double> beta) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInputError("noise level must lie in (0,1)");
    const double factor = beta ? (1.0 - 2.0 * *beta) : 1.0;
    const double a = T + 0.5 * p;
    return a / (std::sqrt((a + 1.0) * (a + 1.0) + 4.0 * a * factor * std::log(1.0 / eps)) + a - 1.0);
}

} // namespace retrodiff
