#pragma once

#include "retrodiff/backward.hpp"
#include "retrodiff/config.hpp"
#include "retrodiff/forward.hpp"
#include "retrodiff/iteration.hpp"
#include "retrodiff/rate_fit.hpp"

#include <filesystem>
#include <optional>

namespace retrodiff {

/// One (eps, t) cell of a sweep.
struct CellRecord {
    double eps = 0.0;
    double t = 0.0;
    std::map<std::string, std::string> plan_kv;
    double c_eps = 0.0;
    double m_eps = 0.0;
    std::size_t mask_size = 0;
    int picard_iters = 0;
    double error_hp = 0.0;                  // against the forward ground truth
    std::optional<double> scheme_error;     // iterative-mode error at the same node
    std::optional<double> mode_gap;         // |picard - iterate| at the node
};

/// Fitted log-log slope for one evaluation time.
struct TimeSeriesFit {
    double t = 0.0;
    double predicted_exponent = 0.0;
    LineFit fit;
    std::vector<double> eps;
    std::vector<double> errors;
};

/// Error at t_eps against the initial state, per sweep entry.
struct TZeroRecord {
    double eps = 0.0;
    double t_eps = 0.0;
    double interval_lo = 0.0;
    double interval_hi = 0.0;
    double error_hp = 0.0;
    double bound_shape = 0.0; // unit-constant logarithmic bound value
};

struct TZeroStudy {
    std::vector<TZeroRecord> rows;
    ShapeFit fit; // error ~ c * bound_shape
};

struct StudyResult {
    ExperimentConfig config;
    std::vector<CellRecord> cells;
    std::vector<TimeSeriesFit> fits;
    std::optional<TZeroStudy> t_zero;
};

/// Synthesizes ground truth, runs the (eps, t) sweep in the configured mode,
/// fits slopes per evaluation time, and (when enabled) evaluates the
/// reconstruction at t_eps against the initial state.  Errors from any stage
/// propagate with the (eps, t) coordinates prepended to the message.
StudyResult run_rate_study(const ExperimentConfig& cfg);

/// The t_eps part alone (needs only the root solver and one backward solve
/// per eps).
TZeroStudy run_t_zero_study(const ExperimentConfig& cfg, const Trajectory& traj);

/// Writes manifest.json, errors.csv, ratefit.csv, per-time loglog_*.csv and
/// t0.csv under out_dir.  Refuses to overwrite an existing manifest unless
/// the config sets the overwrite flag.  Output bytes depend only on the
/// result contents, so a fixed config and seed reproduce identical files.
void emit(const StudyResult& result, const std::filesystem::path& out_dir, bool overwrite);

/// Per-sweep noise seed: decorrelates the sweep entries deterministically.
std::uint64_t sweep_seed(std::uint64_t base_seed, std::size_t sweep_index);

} // namespace retrodiff
