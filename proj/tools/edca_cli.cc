// Command-line front end: solve the AP parameter plan, run scenarios and presets.

#include "edca/analytics.hpp"
#include "edca/harness.hpp"
#include "edca/presets.hpp"

#include "CLI11.hpp"
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iomanip>
#include <iostream>

using namespace edca;

namespace {

void
setupLogging ()
{
  spdlog::set_pattern ("[%l] %v");
  spdlog::set_level (spdlog::level::warn);
  if (const char *lvl = std::getenv ("EDCA_LOG_LEVEL"))
    spdlog::set_level (spdlog::level::from_str (lvl));
}

struct RunArgs
{
  std::string mode = "adaptive";
  int seeds = 0;  // 0: keep the scenario's list
  double scale = 1.0;
  std::string out;
  unsigned threads = 0;
};

void
addRunOptions (CLI::App *cmd, RunArgs &a)
{
  cmd->add_option ("--mode", a.mode, "off | analytic | adaptive")->check (CLI::IsMember ({"off", "analytic", "adaptive"}));
  cmd->add_option ("--seeds", a.seeds, "run seeds 1..k instead of the scenario's list")->check (CLI::PositiveNumber);
  cmd->add_option ("--scale", a.scale, "flow-count scale factor")->check (CLI::PositiveNumber);
  cmd->add_option ("--out", a.out, "per-flow CSV; intervals go to <stem>_intervals.csv");
  cmd->add_option ("--threads", a.threads, "concurrent seeds (0 = all cores)");
}

int
execute (ScenarioSpec spec, const RunArgs &a)
{
  if (a.seeds > 0)
    {
      spec.seeds.clear ();
      for (int k = 1; k <= a.seeds; ++k)
        spec.seeds.push_back (static_cast<std::uint64_t> (k));
    }
  const auto report = runScenario (spec, parseRunMode (a.mode), a.threads);
  std::cout << formatSummary (report);
  if (!a.out.empty ())
    {
      writeFlowCsv (report, a.out);
      writeIntervalCsv (report, intervalCsvPath (a.out));
      std::cout << "wrote " << a.out << " and " << intervalCsvPath (a.out) << "\n";
    }
  return 0;
}

} // namespace

int
main (int argc, char **argv)
{
  setupLogging ();
  CLI::App app{"802.11e EDCA uplink/downlink fairness: AP parameter solver and WLAN simulator"};
  app.require_subcommand (1);

  // solve
  auto *solve = app.add_subcommand ("solve", "print the AP parameter plan for a target downlink/uplink ratio");
  TrafficClassParams sta;
  double cwMax = 511;
  int nUp = 10;
  int nDown = 10;
  double ratio = 0.0;
  std::vector<double> higher;
  std::string backoff = "fractional";
  sta.cwMin = 31;
  solve->add_option ("--cw-min", sta.cwMin, "station CW_min")->check (CLI::PositiveNumber);
  solve->add_option ("--cw-max", cwMax, "station CW_max");
  solve->add_option ("--aifsn", sta.aifsn, "station AIFSN");
  solve->add_option ("--retry", sta.retryLimit, "retry limit");
  solve->add_option ("--txop", sta.nTxop, "station TXOP in packets");
  solve->add_option ("--n-up", nUp, "uplink flows n_u")->check (CLI::PositiveNumber);
  solve->add_option ("--n-down", nDown, "downlink flows n_d")->check (CLI::NonNegativeNumber);
  solve->add_option ("--ratio", ratio, "U_r directly (overrides n_d/n_u)");
  solve->add_option ("--higher-cw", higher, "CW_min of higher-priority ACs");

  // run
  auto *run = app.add_subcommand ("run", "run a scenario file");
  std::string scenarioPath;
  RunArgs runArgs;
  run->add_option ("--scenario", scenarioPath, "JSON scenario file")->required ()->check (CLI::ExistingFile);
  addRunOptions (run, runArgs);

  // preset
  auto *preset = app.add_subcommand ("preset", "run (or dump) one of the seven evaluation scenarios");
  int presetId = 1;
  RunArgs presetArgs;
  presetArgs.scale = kDeskScale;
  bool dump = false;
  preset->add_option ("--id", presetId, "experiment 1..7")->required ()->check (CLI::Range (1, 7));
  addRunOptions (preset, presetArgs);
  preset->add_flag ("--dump", dump, "print the scenario as JSON instead of running it");

  CLI11_PARSE (app, argc, argv);

  try
    {
      if (*solve)
        {
          sta.m = stagesFor (sta.cwMin, cwMax);
          const double ur = ratio > 0.0 ? ratio : static_cast<double> (nDown) / nUp;
          const auto plan = analytics::computeApParameters (sta, nUp, ur, higher);
          std::cout << std::setprecision (6) << "U_r            " << ur << "\n"
                    << "AIFSN_AP       " << plan.aifsn << "\n"
                    << "CW_min_AP      " << plan.cwMin << "\n"
                    << "CW_min_AP int  " << plan.roundedCwMin << "\n"
                    << "N_TXOP_AP      " << plan.nTxop << "\n"
                    << "predicted U    " << plan.predictedUtilization << "\n"
                    << "tau station    " << plan.tauStation << "\n"
                    << "tau AP         " << plan.tauAp << "\n";
          return 0;
        }
      if (*run)
        return execute (loadScenario (scenarioPath, runArgs.scale), runArgs);
      if (*preset)
        {
          auto spec = experimentPreset (presetId, presetArgs.scale);
          if (dump)
            {
              std::cout << scenarioToJson (spec) << "\n";
              return 0;
            }
          return execute (std::move (spec), presetArgs);
        }
    }
  catch (const std::exception &e)
    {
      spdlog::error ("{}", e.what ());
      return 1;
    }
  return 0;
}
