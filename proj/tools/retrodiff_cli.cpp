// Experiment driver for the backward reaction-diffusion solver.
// Subcommands: forward, invert, iterate, rate-study, t-eps.

#include <CLI11.hpp>

#include "retrodiff/backward.hpp"
#include "retrodiff/errors.hpp"
#include "retrodiff/experiment.hpp"
#include "retrodiff/field_io.hpp"
#include "retrodiff/iteration.hpp"
#include "retrodiff/noise.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace retrodiff;

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    bool overwrite = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "declarative config file (key = value lines)");
    cmd->add_option("-s,--set", args.overrides,
                    "config override 'key=value'; may be given repeatedly")
        ->take_all();
    cmd->add_option("-o,--out", args.out_dir, "output directory (overrides config out_dir)");
    cmd->add_flag("--overwrite", args.overwrite, "replace existing outputs");
}

ExperimentConfig load_config(const CommonArgs& args) {
    ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = parse_config_file(args.config_path);
    for (const std::string& kv : args.overrides) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw InvalidInputError("override must look like key=value: '" + kv + "'");
        apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.overwrite) cfg.overwrite = true;
    return cfg;
}

void refuse_existing(const fs::path& probe, bool overwrite) {
    if (fs::exists(probe) && !overwrite)
        throw IoError("output already exists (" + probe.string() +
                      "); pass --overwrite to replace it");
}

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
    fs::path dir = cfg.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir.string());
    return dir;
}

int cmd_forward(const CommonArgs& args, int stride) {
    ExperimentConfig cfg = load_config(args);
    validate(cfg);
    const Nonlinearity f = catalog(cfg.nonlinearity, cfg.nl_params);
    const SpectralField g0 = cfg.profile == "cosine_bump"
                                 ? cosine_bump_profile(cfg.grid, cfg.amplitude)
                                 : spectral_decay_profile(cfg.grid, cfg.amplitude, cfg.profile_decay);
    const Trajectory traj = evolve(g0, f, cfg.T, {cfg.steps, cfg.p, 1e6});

    const fs::path dir = prepare_out_dir(cfg);
    refuse_existing(dir / "trajectory.tsv", cfg.overwrite);

    std::ofstream manifest(dir / "trajectory.tsv");
    if (!manifest) throw IoError("cannot write trajectory manifest");
    manifest << "# time\thp_norm\tgevrey_norm\tfield_file\n";
    const auto profile = gevrey_profile(traj, cfg.p);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::string file;
        if (i % static_cast<std::size_t>(stride) == 0 || i + 1 == traj.times.size()) {
            char name[32];
            std::snprintf(name, sizeof(name), "node_%05zu.field", i);
            file = name;
            write_field(dir / file, traj.states[i]);
        }
        manifest << format_double(traj.times[i]) << "\t" << format_double(traj.hp_norms[i])
                 << "\t" << format_double(profile[i].second) << "\t" << file << "\n";
    }
    std::cout << "forward solve: " << traj.times.size() << " nodes, final H^" << cfg.p
              << " norm " << format_double(traj.hp_norms.back()) << ", wrote "
              << (dir / "trajectory.tsv") << "\n";
    return 0;
}

int cmd_invert(const CommonArgs& args, double eps, double t, const std::string& data_path) {
    ExperimentConfig cfg = load_config(args);
    if (cfg.eval_times.empty() && t <= 0.0)
        throw InvalidInputError("invert needs --t or eval_times in the config");
    const double t_star = t > 0.0 ? t : cfg.eval_times.front();
    cfg.eval_times = {t_star};
    cfg.eps_sweep = {eps};
    validate(cfg);

    const Nonlinearity f = catalog(cfg.nonlinearity, cfg.nl_params);
    const SpectralField g0 = cfg.profile == "cosine_bump"
                                 ? cosine_bump_profile(cfg.grid, cfg.amplitude)
                                 : spectral_decay_profile(cfg.grid, cfg.amplitude, cfg.profile_decay);
    const Trajectory traj = evolve(g0, f, cfg.T, {cfg.steps, cfg.p, 1e6});

    SpectralField gT_eps = data_path.empty()
                               ? inject_noise(traj.final_state(), eps, sweep_seed(cfg.seed, 0), cfg.p)
                               : read_field(data_path);

    CutoffRule rule;
    rule.eps = eps;
    rule.p = cfg.p;
    rule.T = cfg.T;
    rule.t_star = t_star;
    rule.gevrey_bound = cfg.bound_mode == "prescribed"
                            ? cfg.gevrey_bound
                            : gevrey_norm(traj.states[traj.node_at_or_below(t_star)], t_star, cfg.p);
    rule.scale = cfg.cutoff_scale;
    rule.beta = cfg.beta;
    rule.lipschitz = f.lipschitz_bound(std::max(max_abs_value(traj.final_state()), 1e-9));
    const RegularizationPlan plan = make_plan(cfg.grid, rule, &f);

    const BackwardSolution sol = solve_backward(
        gT_eps, f, plan, {cfg.quad_nodes, cfg.picard_tol, cfg.picard_max_iter, t_star});

    const fs::path dir = prepare_out_dir(cfg);
    refuse_existing(dir / "plan.txt", cfg.overwrite);
    std::ofstream plan_out(dir / "plan.txt");
    for (const auto& [key, value] : plan_to_kv(plan)) plan_out << key << " = " << value << "\n";
    write_field(dir / "reconstruction.field", sol.state_at(t_star));

    const double err = sobolev_distance(sol.state_at(t_star), traj.state_at(t_star), cfg.p);
    std::cout << "invert: C_eps " << format_double(plan.c_eps()) << ", mask " << plan.mask_size
              << " modes, picard sweeps " << sol.picard_residuals.size() << ", H^" << cfg.p
              << " error vs ground truth " << format_double(err) << "\n";
    return 0;
}

int cmd_iterate(const CommonArgs& args, double eps) {
    ExperimentConfig cfg = load_config(args);
    if (cfg.eps_sweep.empty()) cfg.eps_sweep = {eps};
    validate(cfg);

    const Nonlinearity f = catalog(cfg.nonlinearity, cfg.nl_params);
    const SpectralField g0 = cfg.profile == "cosine_bump"
                                 ? cosine_bump_profile(cfg.grid, cfg.amplitude)
                                 : spectral_decay_profile(cfg.grid, cfg.amplitude, cfg.profile_decay);
    const Trajectory traj = evolve(g0, f, cfg.T, {cfg.steps, cfg.p, 1e6});
    const SpectralField gT_eps =
        inject_noise(traj.final_state(), cfg.eps_sweep.front(), sweep_seed(cfg.seed, 0), cfg.p);

    const double t_min = cfg.T - cfg.T; // scheme reaches t_N = 0
    CutoffRule rule;
    rule.eps = cfg.eps_sweep.front();
    rule.p = cfg.p;
    rule.T = cfg.T;
    rule.t_star = cfg.eval_times.empty() ? cfg.T / 2 : cfg.eval_times.front();
    rule.gevrey_bound = cfg.bound_mode == "prescribed"
                            ? cfg.gevrey_bound
                            : gevrey_norm(traj.states[traj.node_at_or_below(rule.t_star)],
                                          rule.t_star, cfg.p);
    rule.scale = cfg.cutoff_scale;
    rule.beta = cfg.beta;
    rule.lipschitz = f.lipschitz_bound(std::max(max_abs_value(traj.final_state()), 1e-9));
    const RegularizationPlan plan = make_plan(cfg.grid, rule, &f);

    const SchemeState scheme = iterate(gT_eps, f, plan,
                                       {cfg.scheme_nodes, cfg.scheme_sweeps,
                                        cfg.k_rule == "paper" ? KRule::Paper : KRule::GammaOnly,
                                        std::nullopt});
    const BackwardSolution reference = solve_backward(
        gT_eps, f, plan,
        {cfg.scheme_nodes * ((cfg.quad_nodes + cfg.scheme_nodes - 1) / cfg.scheme_nodes) + 1,
         cfg.picard_tol, cfg.picard_max_iter, t_min});
    const IterationReport report = convergence_report(scheme, reference);

    const fs::path dir = prepare_out_dir(cfg);
    refuse_existing(dir / "iteration_report.tsv", cfg.overwrite);
    std::ofstream out(dir / "iteration_report.tsv");
    write_report(out, report);
    for (const NodeConvergence& node : report.nodes)
        std::cout << "node t = " << format_double(node.t) << ": K = " << format_double(node.K)
                  << ", mu_bar = " << format_double(node.mu_bar)
                  << ", fitted ratio = " << format_double(node.fitted_ratio) << "\n";
    return 0;
}

int cmd_rate_study(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args);
    const StudyResult result = run_rate_study(cfg);
    emit(result, cfg.out_dir, cfg.overwrite);
    for (const TimeSeriesFit& fit : result.fits)
        std::cout << "t = " << format_double(fit.t) << ": fitted slope "
                  << format_double(fit.fit.slope) << " (predicted "
                  << format_double(fit.predicted_exponent) << ", stderr "
                  << format_double(fit.fit.slope_stderr) << ")\n";
    if (result.t_zero)
        std::cout << "t_eps study: c_fit " << format_double(result.t_zero->fit.constant)
                  << ", relative residual "
                  << format_double(result.t_zero->fit.relative_residual) << "\n";
    std::cout << "artifacts written to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_t_eps(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args);
    if (cfg.eps_sweep.empty())
        throw InvalidInputError("t-eps needs an eps_sweep");
    std::cout << "eps,t_eps,interval_lo,interval_hi,residual\n";
    for (double eps : cfg.eps_sweep) {
        const TimeChoice tc = select_t_eps(eps, cfg.T, cfg.p, cfg.beta);
        std::cout << format_double(eps) << "," << format_double(tc.t_eps) << ","
                  << format_double(tc.interval_lo) << "," << format_double(tc.interval_hi) << ","
                  << format_double(tc.residual) << "\n";
    }
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"spectral solver and experiment harness for the time-reversed "
                 "reaction-diffusion problem"};
    app.require_subcommand(1);

    CommonArgs fwd_args;
    int stride = 16;
    auto* fwd = app.add_subcommand("forward", "evolve g0 forward and export the trajectory");
    add_common(fwd, fwd_args);
    fwd->add_option("--stride", stride, "write every k-th node field (default 16)");

    CommonArgs inv_args;
    double inv_eps = 1e-4, inv_t = 0.0;
    std::string data_path;
    auto* inv = app.add_subcommand("invert", "solve the backward problem from noisy final data");
    add_common(inv, inv_args);
    inv->add_option("--eps", inv_eps, "noise level");
    inv->add_option("--t", inv_t, "evaluation time (defaults to the config's first eval time)");
    inv->add_option("--data", data_path, "field file with measured final data");

    CommonArgs it_args;
    double it_eps = 1e-4;
    auto* it = app.add_subcommand("iterate", "run the stabilized iterative scheme");
    add_common(it, it_args);
    it->add_option("--eps", it_eps, "noise level (when the config has no sweep)");

    CommonArgs rs_args;
    auto* rs = app.add_subcommand("rate-study", "epsilon sweep with rate fits and artifacts");
    add_common(rs, rs_args);

    CommonArgs te_args;
    auto* te = app.add_subcommand("t-eps", "print the time-selection roots for the sweep");
    add_common(te, te_args);

    CLI11_PARSE(app, argc, argv);

    if (fwd->parsed()) return cmd_forward(fwd_args, stride);
    if (inv->parsed()) return cmd_invert(inv_args, inv_eps, inv_t, data_path);
    if (it->parsed()) return cmd_iterate(it_args, it_eps);
    if (rs->parsed()) return cmd_rate_study(rs_args);
    if (te->parsed()) return cmd_t_eps(te_args);
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible plan: " << e.what() << "\n";
        return 2;
    } catch (const OverflowGuardError& e) {
        std::cerr << "infeasible plan: " << e.what() << "\n";
        return 2;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const BlowupError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
