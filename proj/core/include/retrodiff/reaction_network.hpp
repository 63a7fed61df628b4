#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace retrodiff {

/// Stoichiometry of R reactions over L species:
///   sum_l alpha(l,r) X_l  ->  sum_l eta(l,r) X_l.
/// Entries are nonnegative integers, stored species-major (alpha[l*R + r]).
struct ReactionNetwork {
    int species = 0;   // L
    int reactions = 0; // R
    std::vector<int> alpha;
    std::vector<int> eta;

    int alpha_at(int l, int r) const { return alpha[static_cast<std::size_t>(l) * reactions + r]; }
    int eta_at(int l, int r) const { return eta[static_cast<std::size_t>(l) * reactions + r]; }
};

void validate(const ReactionNetwork& net);

/// Vector reaction field over species concentrations.
using VectorField = std::function<std::vector<double>(std::span<const double>)>;

/// Mass-action right-hand side
///   F_l(u) = sum_r (eta(l,r) - alpha(l,r)) prod_m u_m^alpha(m,r).
VectorField mass_action_field(const ReactionNetwork& net);

/// Componentwise state clamp: evaluates f at min(max(u_m, -M), M).  The
/// scalar cut-off has no canonical vector analogue; this componentwise form
/// is this library's extension and keeps the field globally Lipschitz.
VectorField clamp_componentwise(VectorField f, double M);

/// Matrix text format: "L R" on the first line, then L rows of alpha and
/// L rows of eta (R integers each).
void write_network(std::ostream& out, const ReactionNetwork& net);
ReactionNetwork read_network(std::istream& in);
ReactionNetwork read_network(const std::filesystem::path& path);

} // namespace retrodiff
