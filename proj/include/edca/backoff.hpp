#ifndef EDCA_BACKOFF_HPP
#define EDCA_BACKOFF_HPP

#include <cstdint>
#include <random>

namespace edca {

using Rng = std::mt19937_64;

/// How an entity turns its (possibly fractional) contention window into a
/// backoff counter.
enum class BackoffMode
{
  Standard,   ///< integer window, counter uniform in [0, W]
  Fractional, ///< integer window W' drawn with E[W'] = W, then uniform in [0, W']
};

/// Uniform integer in [0, window].
int backoffDrawStandard (int window, Rng &rng);

/// Integer window W' with Pr(W' = floor(W)) = ceil(W) - W and
/// Pr(W' = ceil(W)) = W - floor(W).
int fractionalWindow (double window, Rng &rng);

/// Counter drawn uniformly in [0, W'] with W' = fractionalWindow(window).
int backoffDrawFractional (double window, Rng &rng);

} // namespace edca

#endif
