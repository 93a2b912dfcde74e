#ifndef EDCA_PRESETS_HPP
#define EDCA_PRESETS_HPP

#include "edca/scenario.hpp"

namespace edca {

/// Desk-scale versions of the seven evaluation scenarios. `scale` multiplies
/// flow counts (10 per group for ids 1, 2 and 7; 20 or 30 arrivals per
/// type for ids 3 to 6) and, below 1, horizon and AP buffer.
ScenarioSpec experimentPreset (int id, double scale = 1.0);

/// Default scale used by the CLI and the acceptance suite.
inline constexpr double kDeskScale = 0.4;

} // namespace edca

#endif
