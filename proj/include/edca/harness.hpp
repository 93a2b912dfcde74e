#ifndef EDCA_HARNESS_HPP
#define EDCA_HARNESS_HPP

#include "edca/metrics.hpp"
#include "edca/scenario.hpp"

namespace edca {

/// One seed of a scenario under the given controller mode.
SimTrace runSeed (const ScenarioSpec &spec, RunMode mode, std::uint64_t seed);

/// Runs every seed of `spec` (concurrently, up to `threads`; 0 = hardware
/// concurrency) and reduces the traces in seed order.
MetricsReport runScenario (const ScenarioSpec &spec, RunMode mode, unsigned threads = 0);

} // namespace edca

#endif
