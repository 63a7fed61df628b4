#pragma once

#include "retrodiff/field.hpp"

#include <cstdint>

namespace retrodiff {

/// g_T + eta with a seeded pseudo-random real perturbation scaled so the
/// sequence-space L^2 norm of eta equals eps exactly (to roundoff).
///
/// eta starts as white Gaussian point values, is spectrally damped by
/// (1 + lambda_j)^{-p/2} so the noisy datum stays in H^p like the clean one,
/// and is rescaled last.  The generator is a fixed Box-Muller map over
/// mt19937_64, so a seed pins every bit of the perturbation.  eps = 0
/// returns the datum unchanged.
SpectralField inject_noise(const SpectralField& gT, double eps, std::uint64_t seed, int p);

/// Deterministic profile used by the experiment configs: band coefficients
/// amplitude/2 * lambda_j^{-decay} with a fixed phase twist (real field,
/// algebraically decaying spectrum, no even symmetry).
SpectralField spectral_decay_profile(const GridSpec& grid, double amplitude, double decay);

/// Smooth positive bump exp(cos-type) profile for forward demos.
SpectralField cosine_bump_profile(const GridSpec& grid, double amplitude);

} // namespace retrodiff
