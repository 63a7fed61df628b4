#include "retrodiff/config.hpp"

#include "retrodiff/errors.hpp"
#include "retrodiff/field_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace retrodiff {

namespace {

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw InvalidInputError("config key '" + key + "': not a number: '" + value + "'");
    return v;
}

int to_int(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    const int n = static_cast<int>(v);
    if (v != n) throw InvalidInputError("config key '" + key + "': not an integer: '" + value + "'");
    return n;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw InvalidInputError("config key '" + key + "': not a boolean: '" + value + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

std::string render_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += format_double(values[i]);
    }
    return out;
}

} // namespace

const char* to_string(StudyMode mode) {
    switch (mode) {
        case StudyMode::Picard: return "picard";
        case StudyMode::Iterative: return "iterative";
        case StudyMode::Both: return "both";
    }
    return "picard";
}

StudyMode study_mode_from(const std::string& token) {
    if (token == "picard") return StudyMode::Picard;
    if (token == "iterative") return StudyMode::Iterative;
    if (token == "both") return StudyMode::Both;
    throw InvalidInputError("unknown study mode '" + token + "'");
}

void validate(const ExperimentConfig& cfg) {
    validate(cfg.grid);
    if (!(cfg.T > 0.0)) throw InvalidInputError("horizon T must be positive");
    if (cfg.steps < 8) throw InvalidInputError("forward steps must be >= 8");
    if (2 * cfg.p <= cfg.grid.dim)
        throw InvalidInputError("need p > d/2: p = " + std::to_string(cfg.p) + ", d = " +
                                std::to_string(cfg.grid.dim));
    for (std::size_t i = 0; i < cfg.eps_sweep.size(); ++i) {
        const double e = cfg.eps_sweep[i];
        if (!(e > 0.0 && e < 1.0))
            throw InvalidInputError("eps sweep entries must lie in (0,1)");
        if (i > 0 && !(e < cfg.eps_sweep[i - 1]))
            throw InvalidInputError("eps sweep must be strictly decreasing");
    }
    for (double t : cfg.eval_times)
        if (!(t > 0.0 && t < cfg.T))
            throw InvalidInputError("eval times must lie in (0,T)");
    if (cfg.beta && !(*cfg.beta > 0.0 && *cfg.beta < 0.5))
        throw InvalidInputError("beta must lie in (0, 1/2)");
    if (cfg.bound_mode != "oracle" && cfg.bound_mode != "prescribed")
        throw InvalidInputError("bound_mode must be 'oracle' or 'prescribed'");
    if (cfg.bound_mode == "prescribed" && !(cfg.gevrey_bound > 0.0))
        throw InvalidInputError("prescribed gevrey bound must be positive");
    if (cfg.k_rule != "paper" && cfg.k_rule != "gamma_only")
        throw InvalidInputError("k_rule must be 'paper' or 'gamma_only'");
    if (cfg.quad_nodes < 4) throw InvalidInputError("quad_nodes must be >= 4");
    if (cfg.scheme_nodes < 1 || cfg.scheme_sweeps < 2)
        throw InvalidInputError("scheme needs >= 1 node and >= 2 sweeps");
    if (!(cfg.picard_tol > 0.0) || cfg.picard_max_iter < 1)
        throw InvalidInputError("picard tolerance/iteration budget invalid");
    if (cfg.mode != StudyMode::Picard) {
        if (cfg.steps % cfg.scheme_nodes != 0)
            throw InvalidInputError("iterative mode needs steps divisible by scheme_nodes");
        for (double t : cfg.eval_times) {
            const double pos = (cfg.T - t) / (cfg.T / cfg.scheme_nodes);
            if (std::abs(pos - std::round(pos)) > 1e-9)
                throw InvalidInputError("iterative mode needs eval times on the scheme nodes");
        }
    }
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "d") cfg.grid.dim = to_int(key, value);
    else if (key == "n") cfg.grid.n_per_axis = to_int(key, value);
    else if (key == "ell") cfg.grid.ell = to_double(key, value);
    else if (key == "nonlinearity") cfg.nonlinearity = value;
    else if (key.rfind("param.", 0) == 0) cfg.nl_params[key.substr(6)] = to_double(key, value);
    else if (key == "T") cfg.T = to_double(key, value);
    else if (key == "steps") cfg.steps = to_int(key, value);
    else if (key == "p") cfg.p = to_int(key, value);
    else if (key == "profile") cfg.profile = value;
    else if (key == "amplitude") cfg.amplitude = to_double(key, value);
    else if (key == "profile_decay") cfg.profile_decay = to_double(key, value);
    else if (key == "eps_sweep") cfg.eps_sweep = to_list(key, value);
    else if (key == "beta") {
        if (value == "none") cfg.beta.reset();
        else cfg.beta = to_double(key, value);
    }
    else if (key == "eval_times") cfg.eval_times = to_list(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::strtoull(value.c_str(), nullptr, 10));
    else if (key == "mode") cfg.mode = study_mode_from(value);
    else if (key == "cutoff_scale") cfg.cutoff_scale = to_double(key, value);
    else if (key == "bound_mode") cfg.bound_mode = value;
    else if (key == "gevrey_bound") cfg.gevrey_bound = to_double(key, value);
    else if (key == "quad_nodes") cfg.quad_nodes = to_int(key, value);
    else if (key == "picard_tol") cfg.picard_tol = to_double(key, value);
    else if (key == "picard_max_iter") cfg.picard_max_iter = to_int(key, value);
    else if (key == "scheme_nodes") cfg.scheme_nodes = to_int(key, value);
    else if (key == "scheme_sweeps") cfg.scheme_sweeps = to_int(key, value);
    else if (key == "k_rule") cfg.k_rule = value;
    else if (key == "with_t_zero") cfg.with_t_zero = to_bool(key, value);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "overwrite") cfg.overwrite = to_bool(key, value);
    else throw InvalidInputError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInputError("config line " + std::to_string(lineno) +
                                    ": expected 'key = value'");
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::map<std::string, std::string> config_to_kv(const ExperimentConfig& cfg) {
    std::map<std::string, std::string> kv;
    kv["d"] = std::to_string(cfg.grid.dim);
    kv["n"] = std::to_string(cfg.grid.n_per_axis);
    kv["ell"] = format_double(cfg.grid.ell);
    kv["nonlinearity"] = cfg.nonlinearity;
    for (const auto& [name, value] : cfg.nl_params) kv["param." + name] = format_double(value);
    kv["T"] = format_double(cfg.T);
    kv["steps"] = std::to_string(cfg.steps);
    kv["p"] = std::to_string(cfg.p);
    kv["profile"] = cfg.profile;
    kv["amplitude"] = format_double(cfg.amplitude);
    kv["profile_decay"] = format_double(cfg.profile_decay);
    kv["eps_sweep"] = render_list(cfg.eps_sweep);
    kv["beta"] = cfg.beta ? format_double(*cfg.beta) : "none";
    kv["eval_times"] = render_list(cfg.eval_times);
    kv["seed"] = std::to_string(cfg.seed);
    kv["mode"] = to_string(cfg.mode);
    kv["cutoff_scale"] = format_double(cfg.cutoff_scale);
    kv["bound_mode"] = cfg.bound_mode;
    kv["gevrey_bound"] = format_double(cfg.gevrey_bound);
    kv["quad_nodes"] = std::to_string(cfg.quad_nodes);
    kv["picard_tol"] = format_double(cfg.picard_tol);
    kv["picard_max_iter"] = std::to_string(cfg.picard_max_iter);
    kv["scheme_nodes"] = std::to_string(cfg.scheme_nodes);
    kv["scheme_sweeps"] = std::to_string(cfg.scheme_sweeps);
    kv["k_rule"] = cfg.k_rule;
    kv["with_t_zero"] = cfg.with_t_zero ? "true" : "false";
    kv["out_dir"] = cfg.out_dir;
    kv["overwrite"] = cfg.overwrite ? "true" : "false";
    return kv;
}

} // namespace retrodiff
