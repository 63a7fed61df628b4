#pragma once

#include "retrodiff/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace retrodiff {

enum class StudyMode : std::uint8_t { Picard, Iterative, Both };

const char* to_string(StudyMode mode);
StudyMode study_mode_from(const std::string& token);

/// Declarative description of one experiment; see docs/config.md for the
/// full key list.  Flat "key = value" text, '#' starts a comment.
struct ExperimentConfig {
    // grid + forward problem
    GridSpec grid;
    std::string nonlinearity = "von_bertalanffy";
    std::map<std::string, double> nl_params = {{"a", 0.0}, {"b", 0.0}, {"N", 1.0}};
    double T = 1.0;
    int steps = 256;
    int p = 1;
    std::string profile = "spectral_decay";
    double amplitude = 1.0;
    double profile_decay = 1.0;

    // study axes
    std::vector<double> eps_sweep; // strictly decreasing, all in (0,1)
    std::optional<double> beta;
    std::vector<double> eval_times; // subset of (0,T), must hit forward nodes
    std::uint64_t seed = 1;
    StudyMode mode = StudyMode::Picard;

    // parameter-choice knobs
    double cutoff_scale = 1.0;        // the free constant of the cut-off rule
    std::string bound_mode = "oracle"; // oracle | prescribed
    double gevrey_bound = 1.0;         // used when bound_mode = prescribed

    // solver knobs
    int quad_nodes = 64;
    double picard_tol = 1e-10;
    int picard_max_iter = 100;
    int scheme_nodes = 4;
    int scheme_sweeps = 64;
    std::string k_rule = "paper"; // paper | gamma_only

    bool with_t_zero = true; // also run the t_eps evaluation along the sweep

    // output
    std::string out_dir = "out";
    bool overwrite = false;
};

/// Throws InvalidInputError when a constraint is violated (sweep ordering,
/// eval times outside (0,T), p <= d/2, unknown mode, ...).
void validate(const ExperimentConfig& cfg);

ExperimentConfig parse_config_file(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Applies one "key = value" override (the CLI's flag passthrough).
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Echo used in manifests; values rendered exactly as parsed back.
std::map<std::string, std::string> config_to_kv(const ExperimentConfig& cfg);

} // namespace retrodiff
