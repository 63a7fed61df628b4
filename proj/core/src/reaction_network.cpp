#include "retrodiff/reaction_network.hpp"

#include "retrodiff/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace retrodiff {

void validate(const ReactionNetwork& net) {
    if (net.species < 1 || net.reactions < 1)
        throw InvalidInputError("reaction network needs at least one species and one reaction");
    const std::size_t expected =
        static_cast<std::size_t>(net.species) * static_cast<std::size_t>(net.reactions);
    if (net.alpha.size() != expected || net.eta.size() != expected)
        throw InvalidInputError("stoichiometric matrices must be L x R");
    for (int v : net.alpha)
        if (v < 0) throw InvalidInputError("alpha entries must be nonnegative");
    for (int v : net.eta)
        if (v < 0) throw InvalidInputError("eta entries must be nonnegative");
}

VectorField mass_action_field(const ReactionNetwork& net) {
    validate(net);
    ReactionNetwork local = net;
    return [local](std::span<const double> u) {
        if (static_cast<int>(u.size()) != local.species)
            throw InvalidInputError("state dimension does not match species count");
        for (double x : u)
            if (!std::isfinite(x)) throw InvalidInputError("non-finite concentration");
        std::vector<double> out(static_cast<std::size_t>(local.species), 0.0);
        for (int r = 0; r < local.reactions; ++r) {
            double rate = 1.0;
            for (int m = 0; m < local.species; ++m) {
                const int order = local.alpha_at(m, r);
                for (int k = 0; k < order; ++k) rate *= u[static_cast<std::size_t>(m)];
            }
            for (int l = 0; l < local.species; ++l)
                out[static_cast<std::size_t>(l)] +=
                    (local.eta_at(l, r) - local.alpha_at(l, r)) * rate;
        }
        return out;
    };
}

VectorField clamp_componentwise(VectorField f, double M) {
    if (!(M > 0.0)) throw InvalidInputError("clamp level must be positive");
    return [f = std::move(f), M](std::span<const double> u) {
        std::vector<double> clipped(u.begin(), u.end());
        for (double& x : clipped) x = std::min(std::max(x, -M), M);
        return f(clipped);
    };
}

void write_network(std::ostream& out, const ReactionNetwork& net) {
    validate(net);
    out << net.species << " " << net.reactions << "\n";
    for (const auto* mat : {&net.alpha, &net.eta}) {
        for (int l = 0; l < net.species; ++l) {
            for (int r = 0; r < net.reactions; ++r) {
                if (r) out << " ";
                out << (*mat)[static_cast<std::size_t>(l) * net.reactions + r];
            }
            out << "\n";
        }
    }
}

ReactionNetwork read_network(std::istream& in) {
    ReactionNetwork net;
    if (!(in >> net.species >> net.reactions))
        throw IoError("reaction network file: expected 'L R' header");
    if (net.species < 1 || net.reactions < 1)
        throw IoError("reaction network file: L and R must be positive");
    const std::size_t expected =
        static_cast<std::size_t>(net.species) * static_cast<std::size_t>(net.reactions);
    net.alpha.resize(expected);
    net.eta.resize(expected);
    for (auto* mat : {&net.alpha, &net.eta})
        for (std::size_t i = 0; i < expected; ++i)
            if (!((in >> (*mat)[i])))
                throw IoError("reaction network file: truncated stoichiometric matrix");
    validate(net);
    return net;
}

ReactionNetwork read_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open reaction network file: " + path.string());
    return read_network(in);
}

} // namespace retrodiff
