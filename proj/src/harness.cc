#include "edca/harness.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <memory>
#include <thread>

namespace edca {

SimTrace
runSeed (const ScenarioSpec &spec, RunMode mode, std::uint64_t seed)
{
  const auto cfg = buildSimConfig (spec, seed);
  const auto traffic = buildTraffic (spec);
  if (mode == RunMode::Off)
    return runSimulation (cfg, traffic);

  std::vector<AcSetup> acs;
  for (const auto &a : spec.acs)
    acs.push_back ({a.kind, a.station, a.apParams ()});
  AdaptiveController controller (acs, spec.adaptation,
                                 mode == RunMode::Adaptive ? ControllerMode::Full : ControllerMode::Analytic,
                                 spec.apBackoff);
  return runSimulation (cfg, traffic, &controller);
}

MetricsReport
runScenario (const ScenarioSpec &spec, RunMode mode, unsigned threads)
{
  spec.validate ();
  const auto &seeds = spec.seeds;
  std::vector<SimTrace> traces (seeds.size ());
  std::vector<std::exception_ptr> errors (seeds.size ());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size (); i = next++)
      {
        try
          {
            traces[i] = runSeed (spec, mode, seeds[i]);
            spdlog::debug ("{} mode={} seed={} done", spec.name, toString (mode), seeds[i]);
          }
        catch (...)
          {
            errors[i] = std::current_exception ();
          }
      }
  };

  if (threads == 0)
    threads = std::max (1u, std::thread::hardware_concurrency ());
  threads = std::min<unsigned> (threads, static_cast<unsigned> (seeds.size ()));
  if (threads <= 1)
    worker ();
  else
    {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back (worker);
      for (auto &t : pool)
        t.join ();
    }
  for (auto &e : errors)
    if (e)
      std::rethrow_exception (e);
  return buildReport (spec, mode, seeds, traces);
}

} // namespace edca
