#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edca/harness.hpp"
#include "edca/presets.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

using namespace edca;

namespace {

// Second Jain implementation: one fold over (n, sum, sum of squares).
double
jainFold (const std::vector<double> &x)
{
  struct Acc { double n = 0, s = 0, q = 0; };
  const auto a = std::accumulate (x.begin (), x.end (), Acc{}, [] (Acc acc, double v) {
    return Acc{acc.n + 1, acc.s + v, acc.q + v * v};
  });
  return (a.s / a.n) * (a.s / a.n) / (a.q / a.n);
}

std::string
slurp (const std::string &path)
{
  std::ifstream in (path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf ();
  return os.str ();
}

std::string
tmpPath (const std::string &name)
{
  return (std::filesystem::temp_directory_path () / name).string ();
}

const char *kSmall = R"({
  "name": "small",
  "horizon_s": 3,
  "seeds": [7],
  "access_categories": [
    {"name": "data-udp", "kind": "udp", "aifsn": 2, "cw_min": 31, "cw_max": 511},
    {"name": "data-tcp", "kind": "tcp", "aifsn": 2, "cw_min": 63, "cw_max": 1023}
  ],
  "flows": [
    {"direction": "up", "transport": "udp", "ac": "data-udp", "rate_bps": 4e6, "count": 2, "wired_delay_ms": 15},
    {"direction": "down", "transport": "udp", "ac": "data-udp", "rate_bps": 4e6, "count": 2, "start_step_s": 0.001},
    {"direction": "up", "transport": "tcp", "ac": 1, "count": 2, "wired_delay_ms": 12, "wired_delay_step_ms": 2},
    {"direction": "down", "transport": "tcp", "ac": 1, "packets": 31}
  ]
})";

} // namespace

TEST_CASE ("Jain index examples")
{
  const std::vector<double> equal{3, 3, 3};
  const std::vector<double> one{1, 0, 0, 0};
  const std::vector<double> two{3, 1};
  CHECK (jainFairnessIndex (equal) == doctest::Approx (1.0));
  CHECK (jainFairnessIndex (one) == doctest::Approx (0.25));
  CHECK (jainFairnessIndex (two) == doctest::Approx (0.8));
  CHECK_THROWS (jainFairnessIndex (std::vector<double>{0, 0}));
  CHECK_THROWS (jainFairnessIndex (std::vector<double>{}));
}

TEST_CASE ("Jain index agrees with a fold-based implementation")
{
  std::mt19937_64 rng (5);
  std::uniform_real_distribution<double> u (0, 1e7);
  for (int trial = 0; trial < 500; ++trial)
    {
      std::vector<double> x (1 + trial % 17);
      for (auto &v : x)
        v = u (rng);
      CHECK (std::abs (jainFairnessIndex (x) - jainFold (x)) < 1e-12);
    }
}

TEST_CASE ("scenario parsing")
{
  auto s = parseScenario (kSmall);
  CHECK (s.name == "small");
  REQUIRE (s.acs.size () == 2);
  CHECK (s.acs[0].station.m == 4);
  CHECK (s.acs[1].kind == AcKind::Tcp);
  REQUIRE (s.flows.size () == 7);
  CHECK (s.flows[0].wiredDelay == doctest::Approx (0.015));
  CHECK (s.flows[3].start == doctest::Approx (0.001));
  CHECK (s.flows[5].wiredDelay == doctest::Approx (0.014));
  CHECK (s.flows[6].packets == 31);
  CHECK (s.seeds == std::vector<std::uint64_t>{7});

  auto half = parseScenario (kSmall, 0.5);
  CHECK (half.flows.size () == 4);

  // round trip through the writer
  auto again = parseScenario (scenarioToJson (s));
  CHECK (again.flows.size () == s.flows.size ());
  CHECK (again.flows[5].wiredDelay == doctest::Approx (s.flows[5].wiredDelay));
  CHECK (again.acs[1].station.cwMin == 63);
}

TEST_CASE ("scenario errors")
{
  CHECK_THROWS_AS (parseScenario ("{"), ConfigError);
  CHECK_THROWS_AS (parseScenario (R"({"access_categories": []})"), ConfigError);
  CHECK_THROWS_AS (parseScenario (R"({"access_categories": [{"kind": "bogus"}]})"), ConfigError);
  CHECK_THROWS_AS (parseScenario (R"({"access_categories": [{"name": "a"}],
                                      "flows": [{"ac": "b", "rate_bps": 1}]})"),
                   ConfigError);
  CHECK_THROWS_AS (parseScenario (R"({"horizon_s": 5, "access_categories": [{"name": "a"}],
                                      "flows": [{"ac": "a", "rate_bps": 1, "start_s": 9}]})"),
                   ConfigError);
  CHECK_THROWS_AS (parseRunMode ("fast"), ConfigError);
  CHECK_THROWS_AS (experimentPreset (8), ConfigError);
}

TEST_CASE ("empty flow table gives a zero report")
{
  auto s = parseScenario (R"({"horizon_s": 1, "seeds": 2, "access_categories": [{"name": "a"}]})");
  auto r = runScenario (s, RunMode::Adaptive);
  CHECK (r.flows.empty ());
  CHECK (r.groups.empty ());
  CHECK (r.total (Direction::Up, Transport::Udp) == 0.0);
  CHECK (std::isnan (r.ratio (Transport::Udp)));
  const auto path = tmpPath ("edca_empty.csv");
  writeFlowCsv (r, path);
  CHECK (slurp (path) == "flow_id,direction,transport,throughput_bps,mean_delay_s,completion_s\n");
}

TEST_CASE ("CSV rows and determinism")
{
  auto s = parseScenario (R"({"horizon_s": 2, "seeds": [3],
    "access_categories": [{"name": "a"}],
    "flows": [{"direction": "up", "ac": "a", "rate_bps": 1e6},
              {"direction": "down", "ac": "a", "rate_bps": 1e6}]})");
  const auto a = tmpPath ("edca_det_a.csv");
  const auto b = tmpPath ("edca_det_b.csv");
  auto r1 = runScenario (s, RunMode::Adaptive);
  writeFlowCsv (r1, a);
  writeIntervalCsv (r1, intervalCsvPath (a));
  auto r2 = runScenario (s, RunMode::Adaptive);
  writeFlowCsv (r2, b);
  writeIntervalCsv (r2, intervalCsvPath (b));
  const auto text = slurp (a);
  CHECK (std::count (text.begin (), text.end (), '\n') == 3);
  CHECK (text == slurp (b));
  CHECK (slurp (intervalCsvPath (a)) == slurp (intervalCsvPath (b)));
  CHECK (slurp (intervalCsvPath (a)).rfind ("t,measured_U,cw_min_ap,n_txop_effective,ac,seed\n", 0) == 0);
  CHECK (intervalCsvPath ("/x/y/run.csv") == "/x/y/run_intervals.csv");
}

TEST_CASE ("modes differ only in AP parameters, not in arrivals")
{
  auto s = parseScenario (kSmall);
  auto off = runSeed (s, RunMode::Off, 7);
  auto on = runSeed (s, RunMode::Adaptive, 7);
  for (std::size_t i = 0; i < s.flows.size (); ++i)
    if (s.flows[i].transport == Transport::Udp)
      CHECK (off.flows[i].enqueued == on.flows[i].enqueued);
  CHECK (off.intervals.empty ());
  CHECK_FALSE (on.intervals.empty ());
}

TEST_CASE ("metrics conservation")
{
  auto s = parseScenario (kSmall);
  s.seeds = {1, 2};
  auto r = runScenario (s, RunMode::Adaptive, 2);
  for (auto d : {Direction::Up, Direction::Down})
    for (auto t : {Transport::Udp, Transport::Tcp})
      {
        double sum = 0;
        for (const auto &f : r.flows)
          if (f.direction == d && f.transport == t)
            sum += f.throughputBps;
        CHECK (sum == doctest::Approx (r.total (d, t)).epsilon (1e-12));
      }
  // totals against raw trace bytes
  auto tr = runSeed (s, RunMode::Adaptive, 1);
  double bytes = 0;
  for (const auto &f : tr.flows)
    bytes += f.payloadBytes;
  double perSeed = 0;
  for (double x : r.seeds[0].throughputBps)
    perSeed += x;
  CHECK (perSeed == doctest::Approx (bytes * 8 / s.horizon).epsilon (1e-12));
  for (const auto &g : r.groups)
    {
      CHECK (g.jain > 0.0);
      CHECK (g.jain <= 1.0 + 1e-12);
    }
}

TEST_CASE ("presets")
{
  auto p1 = experimentPreset (1, 0.5);
  int up = 0;
  for (const auto &f : p1.flows)
    {
      CHECK (f.wiredDelay == doctest::Approx (0.015));
      up += f.direction == Direction::Up && f.transport == Transport::Udp;
    }
  CHECK (up == 5);
  CHECK (p1.flows.size () == 20);

  auto p2 = experimentPreset (2, 1.0);
  std::vector<double> upTcpDelays;
  for (const auto &f : p2.flows)
    if (f.transport == Transport::Tcp && f.direction == Direction::Up)
      upTcpDelays.push_back (f.wiredDelay * 2);
  REQUIRE (upTcpDelays.size () == 10);
  CHECK (upTcpDelays[0] == doctest::Approx (0.024));
  CHECK (upTcpDelays[1] == doctest::Approx (0.028));

  auto p5 = experimentPreset (5, 1.0);
  std::vector<std::int64_t> sizes;
  for (const auto &f : p5.flows)
    if (f.transport == Transport::Tcp && f.direction == Direction::Down)
      sizes.push_back (f.packets);
  REQUIRE (sizes.size () == 29);  // the 30th arrival would fall after 300 s
  for (std::size_t k = 0; k < sizes.size (); ++k)
    CHECK (sizes[k] == (k % 2 == 0 ? 31 : 0));
  CHECK (std::count (sizes.begin (), sizes.end (), 31) == 15);
  CHECK (p5.horizon == 450);

  auto p3 = experimentPreset (3, 1.0);
  double lastStart = 0;
  for (const auto &f : p3.flows)
    lastStart = std::max (lastStart, f.start);
  CHECK (lastStart < 200.0 + 1e-9);
  CHECK (p3.horizon == 300);

  auto p7 = experimentPreset (7, 0.5);
  REQUIRE (p7.acs.size () == 4);
  CHECK (p7.acs[0].station.cwMin == 7);
  CHECK (p7.acs[0].station.cwMax () == 15);
  CHECK (p7.acs[1].station.cwMin == 15);
  CHECK (p7.acs[1].station.cwMax () == 31);
  CHECK (p7.acs[2].station.cwMin == 31);
  CHECK (p7.acs[3].station.cwMin == 63);
}

TEST_CASE ("multimedia preset keeps realtime parameters fixed")
{
  auto s = experimentPreset (7, 0.2);
  s.horizon = 5;
  auto t = runSeed (s, RunMode::Adaptive, 1);
  for (const auto &b : t.beacons)
    {
      CHECK (b.eCwMin >= 0);
      CHECK (b.eCwMin <= 15);
      if (b.ac == 0)
        CHECK (b.eCwMin == 3);
    }
  for (const auto &iv : t.intervals)
    {
      CHECK (iv.ac >= 2);
      CHECK (iv.cwMinAp >= 15.0);  // never below the video AC
    }
}
