#include "retrodiff/experiment.hpp"

#include "retrodiff/errors.hpp"
#include "retrodiff/field_io.hpp"
#include "retrodiff/noise.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace retrodiff {

namespace {

SpectralField build_profile(const ExperimentConfig& cfg) {
    if (cfg.profile == "spectral_decay")
        return spectral_decay_profile(cfg.grid, cfg.amplitude, cfg.profile_decay);
    if (cfg.profile == "cosine_bump") return cosine_bump_profile(cfg.grid, cfg.amplitude);
    throw InvalidInputError("unknown initial profile '" + cfg.profile + "'");
}

double trajectory_sup(const Trajectory& traj) {
    double sup = 0.0;
    for (const SpectralField& s : traj.states) sup = std::max(sup, max_abs_value(s));
    return sup;
}

// Gevrey bound feeding the cut-off rule: oracle mode evaluates the forward
// state at (or just below) t with index sigma = t; prescribed mode takes the
// configured value.
double gevrey_bound_for(const ExperimentConfig& cfg, const Trajectory& traj, double t) {
    if (cfg.bound_mode == "prescribed") return cfg.gevrey_bound;
    const std::size_t node = traj.node_at_or_below(t);
    return gevrey_norm(traj.states[node], t, cfg.p);
}

std::string cell_tag(double eps, double t) {
    return "(eps = " + format_double(eps) + ", t = " + format_double(t) + ")";
}

// Rethrows the same error type with the sweep coordinates prepended.
[[noreturn]] void throw_with_cell(const Error& e, double eps, double t) {
    const std::string msg = cell_tag(eps, t) + ": " + e.what();
    if (auto* b = dynamic_cast<const BlowupError*>(&e)) throw BlowupError(msg, b->time);
    if (dynamic_cast<const InfeasibleError*>(&e)) throw InfeasibleError(msg);
    if (dynamic_cast<const DivergenceError*>(&e)) throw DivergenceError(msg);
    if (dynamic_cast<const OverflowGuardError*>(&e)) throw OverflowGuardError(msg);
    if (dynamic_cast<const IoError*>(&e)) throw IoError(msg);
    if (dynamic_cast<const InvalidInputError*>(&e)) throw InvalidInputError(msg);
    throw Error(msg);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path.string());
    out << text;
    if (!out.good()) throw IoError("failed while writing: " + path.string());
}

std::string sanitize_time(double t) {
    std::string s = format_double(t);
    for (char& c : s)
        if (c == '.' || c == '+' || c == '-') c = '_';
    return s;
}

} // namespace

std::uint64_t sweep_seed(std::uint64_t base_seed, std::size_t sweep_index) {
    return base_seed + 0x9e3779b97f4a7c15ull * (sweep_index + 1);
}

StudyResult run_rate_study(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.eval_times.empty())
        throw InvalidInputError("rate study needs at least one eval time");

    StudyResult result;
    result.config = cfg;

    const Nonlinearity f = catalog(cfg.nonlinearity, cfg.nl_params);
    const SpectralField g0 = build_profile(cfg);
    const Trajectory traj = evolve(g0, f, cfg.T, {cfg.steps, cfg.p, 1e6});
    const SpectralField& gT = traj.final_state();

    // Global-branch Lipschitz constant: L over the solution range.
    const double data_sup = trajectory_sup(traj);
    const double lipschitz = f.lipschitz_bound(std::max(data_sup, 1e-9));

    const SchemeOptions scheme_options{cfg.scheme_nodes, cfg.scheme_sweeps,
                                       cfg.k_rule == "paper" ? KRule::Paper : KRule::GammaOnly,
                                       std::nullopt};

    for (std::size_t i = 0; i < cfg.eps_sweep.size(); ++i) {
        const double eps = cfg.eps_sweep[i];
        const SpectralField gT_eps = inject_noise(gT, eps, sweep_seed(cfg.seed, i), cfg.p);

        for (double t : cfg.eval_times) {
            try {
                CutoffRule rule;
                rule.eps = eps;
                rule.p = cfg.p;
                rule.T = cfg.T;
                rule.t_star = t;
                rule.gevrey_bound = gevrey_bound_for(cfg, traj, t);
                rule.scale = cfg.cutoff_scale;
                rule.beta = cfg.beta;
                rule.lipschitz = lipschitz;
                const RegularizationPlan plan = make_plan(cfg.grid, rule, &f);

                CellRecord cell;
                cell.eps = eps;
                cell.t = t;
                cell.plan_kv = plan_to_kv(plan);
                cell.c_eps = plan.c_eps();
                cell.m_eps = plan.m_eps;
                cell.mask_size = plan.mask_size;

                const SpectralField& truth = traj.state_at(t);

                std::optional<SpectralField> picard_state;
                if (cfg.mode != StudyMode::Iterative) {
                    PicardOptions popt{cfg.quad_nodes, cfg.picard_tol, cfg.picard_max_iter, t};
                    const BackwardSolution sol = solve_backward(gT_eps, f, plan, popt);
                    cell.picard_iters = static_cast<int>(sol.picard_residuals.size());
                    picard_state = sol.state_at(t);
                    cell.error_hp = sobolev_distance(*picard_state, truth, cfg.p);
                }
                if (cfg.mode != StudyMode::Picard) {
                    const SchemeState scheme = iterate(gT_eps, f, plan, scheme_options);
                    // locate the node matching t
                    std::size_t ni = scheme.nodes.size();
                    for (std::size_t k = 0; k < scheme.nodes.size(); ++k)
                        if (std::abs(scheme.nodes[k] - t) <= 1e-9 * std::max(1.0, cfg.T)) ni = k;
                    if (ni == scheme.nodes.size())
                        throw InvalidInputError("eval time is not a scheme node");
                    const SpectralField& last = scheme.iterates[ni].back();
                    cell.scheme_error = sobolev_distance(last, truth, cfg.p);
                    if (picard_state)
                        cell.mode_gap = sobolev_distance(last, *picard_state, cfg.p);
                    else
                        cell.error_hp = *cell.scheme_error;
                }
                result.cells.push_back(std::move(cell));
            } catch (const Error& e) {
                throw_with_cell(e, eps, t);
            }
        }
    }

    for (double t : cfg.eval_times) {
        TimeSeriesFit fit;
        fit.t = t;
        fit.predicted_exponent = predicted_rate_exponent(t, cfg.T, cfg.p, cfg.beta);
        for (const CellRecord& cell : result.cells) {
            if (cell.t == t) {
                fit.eps.push_back(cell.eps);
                fit.errors.push_back(cell.error_hp);
            }
        }
        if (fit.eps.size() >= 4) fit.fit = fit_loglog(fit.eps, fit.errors);
        result.fits.push_back(std::move(fit));
    }

    if (cfg.with_t_zero) result.t_zero = run_t_zero_study(cfg, traj);
    return result;
}

TZeroStudy run_t_zero_study(const ExperimentConfig& cfg, const Trajectory& traj) {
    validate(cfg);
    const Nonlinearity f = catalog(cfg.nonlinearity, cfg.nl_params);
    const SpectralField& gT = traj.final_state();
    const SpectralField& g0 = traj.initial();
    const double lipschitz = f.lipschitz_bound(std::max(trajectory_sup(traj), 1e-9));

    TZeroStudy study;
    std::vector<double> shapes, errors;
    for (std::size_t i = 0; i < cfg.eps_sweep.size(); ++i) {
        const double eps = cfg.eps_sweep[i];
        const SpectralField gT_eps = inject_noise(gT, eps, sweep_seed(cfg.seed, i), cfg.p);
        try {
            const TimeChoice tc = select_t_eps(eps, cfg.T, cfg.p, cfg.beta);

            CutoffRule rule;
            rule.eps = eps;
            rule.p = cfg.p;
            rule.T = cfg.T;
            rule.t_star = tc.t_eps;
            rule.gevrey_bound = gevrey_bound_for(cfg, traj, tc.t_eps);
            rule.scale = cfg.cutoff_scale;
            rule.beta = cfg.beta;
            rule.lipschitz = lipschitz;
            const RegularizationPlan plan = make_plan(cfg.grid, rule, &f);

            PicardOptions popt{cfg.quad_nodes, cfg.picard_tol, cfg.picard_max_iter, tc.t_eps};
            const BackwardSolution sol = solve_backward(gT_eps, f, plan, popt);

            TZeroRecord row;
            row.eps = eps;
            row.t_eps = tc.t_eps;
            row.interval_lo = tc.interval_lo;
            row.interval_hi = tc.interval_hi;
            row.error_hp = sobolev_distance(sol.state_at(tc.t_eps), g0, cfg.p);
            row.bound_shape = t_zero_bound(eps, cfg.T, cfg.p, cfg.beta);
            shapes.push_back(row.bound_shape);
            errors.push_back(row.error_hp);
            study.rows.push_back(row);
        } catch (const Error& e) {
            throw_with_cell(e, eps, 0.0);
        }
    }
    if (!shapes.empty()) study.fit = fit_shape(shapes, errors);
    return study;
}

void emit(const StudyResult& result, const std::filesystem::path& out_dir, bool overwrite) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir.string());
    const std::filesystem::path manifest_path = out_dir / "manifest.json";
    if (std::filesystem::exists(manifest_path) && !overwrite)
        throw IoError("output directory already holds a study (" + manifest_path.string() +
                      "); pass the overwrite flag to replace it");

    nlohmann::json manifest;
    manifest["format"] = "retrodiff-study v1";
    manifest["config"] = config_to_kv(result.config);
    nlohmann::json plans = nlohmann::json::array();
    for (const CellRecord& cell : result.cells) {
        nlohmann::json entry;
        entry["eps"] = format_double(cell.eps);
        entry["t"] = format_double(cell.t);
        entry["plan"] = cell.plan_kv;
        plans.push_back(entry);
    }
    manifest["plans"] = plans;
    nlohmann::json fits = nlohmann::json::array();
    for (const TimeSeriesFit& fit : result.fits) {
        nlohmann::json entry;
        entry["t"] = format_double(fit.t);
        entry["predicted_exponent"] = format_double(fit.predicted_exponent);
        entry["fitted_slope"] = format_double(fit.fit.slope);
        entry["slope_stderr"] = format_double(fit.fit.slope_stderr);
        entry["points"] = fit.fit.points;
        fits.push_back(entry);
    }
    manifest["rate_fits"] = fits;
    if (result.t_zero) {
        manifest["t_zero"] = {
            {"c_fit", format_double(result.t_zero->fit.constant)},
            {"relative_residual", format_double(result.t_zero->fit.relative_residual)},
        };
    }
    write_text_file(manifest_path, manifest.dump(2) + "\n");

    if (result.cells.empty() && !result.t_zero) return; // manifest only

    std::ostringstream errors;
    errors << "eps,t,c_eps,m_eps,mask_size,picard_iters,error_hp,scheme_error,mode_gap\n";
    for (const CellRecord& cell : result.cells) {
        errors << format_double(cell.eps) << "," << format_double(cell.t) << ","
               << format_double(cell.c_eps) << ","
               << (std::isinf(cell.m_eps) ? "inf" : format_double(cell.m_eps)) << ","
               << cell.mask_size << "," << cell.picard_iters << ","
               << format_double(cell.error_hp) << ","
               << (cell.scheme_error ? format_double(*cell.scheme_error) : "") << ","
               << (cell.mode_gap ? format_double(*cell.mode_gap) : "") << "\n";
    }
    if (!result.cells.empty()) write_text_file(out_dir / "errors.csv", errors.str());

    if (!result.fits.empty()) {
        std::ostringstream ratefit;
        ratefit << "t,predicted_exponent,fitted_slope,slope_stderr,points\n";
        for (const TimeSeriesFit& fit : result.fits) {
            ratefit << format_double(fit.t) << "," << format_double(fit.predicted_exponent) << ","
                    << format_double(fit.fit.slope) << "," << format_double(fit.fit.slope_stderr)
                    << "," << fit.fit.points << "\n";
        }
        write_text_file(out_dir / "ratefit.csv", ratefit.str());

        for (const TimeSeriesFit& fit : result.fits) {
            std::ostringstream loglog;
            loglog << "log10_eps,log10_error\n";
            for (std::size_t i = 0; i < fit.eps.size(); ++i)
                loglog << format_double(std::log10(fit.eps[i])) << ","
                       << format_double(std::log10(fit.errors[i])) << "\n";
            write_text_file(out_dir / ("loglog_t" + sanitize_time(fit.t) + ".csv"), loglog.str());
        }
    }

    if (result.t_zero && !result.t_zero->rows.empty()) {
        std::ostringstream t0;
        t0 << "eps,t_eps,interval_lo,interval_hi,error_hp,bound_shape\n";
        for (const TZeroRecord& row : result.t_zero->rows) {
            t0 << format_double(row.eps) << "," << format_double(row.t_eps) << ","
               << format_double(row.interval_lo) << "," << format_double(row.interval_hi) << ","
               << format_double(row.error_hp) << "," << format_double(row.bound_shape) << "\n";
        }
        write_text_file(out_dir / "t0.csv", t0.str());
    }
}

} // namespace retrodiff
