#include "edca/backoff.hpp"

#include <cmath>
#include <stdexcept>

namespace edca {

int
backoffDrawStandard (int window, Rng &rng)
{
  if (window < 0)
    throw std::domain_error ("backoffDrawStandard: negative window");
  return std::uniform_int_distribution<int> (0, window) (rng);
}

int
fractionalWindow (double window, Rng &rng)
{
  if (!(window >= 0.0))
    throw std::domain_error ("fractionalWindow: negative window");
  const double lo = std::floor (window);
  const double frac = window - lo;
  if (frac == 0.0)
    return static_cast<int> (lo);
  // Pr(ceil) = W - floor(W)
  const bool up = std::uniform_real_distribution<double> (0.0, 1.0) (rng) < frac;
  return static_cast<int> (lo) + (up ? 1 : 0);
}

int
backoffDrawFractional (double window, Rng &rng)
{
  return backoffDrawStandard (fractionalWindow (window, rng), rng);
}

} // namespace edca
