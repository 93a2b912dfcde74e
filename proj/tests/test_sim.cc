#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edca/analytics.hpp"
#include "edca/sim.hpp"

#include <cmath>

using namespace edca;

namespace {

TrafficClassParams
edcaParams (int aifsn, double cw, int m = 4, int r = 7, int txop = 1)
{
  TrafficClassParams p;
  p.aifsn = aifsn;
  p.cwMin = cw;
  p.m = m;
  p.retryLimit = r;
  p.nTxop = txop;
  return p;
}

// N saturated uplink stations plus one saturated downlink AP queue.
struct Saturated
{
  SimConfig cfg;
  TrafficBinding flows;
};

Saturated
saturated (int n, TrafficClassParams sta, TrafficClassParams ap, BackoffMode mode = BackoffMode::Standard)
{
  Saturated s;
  for (int i = 0; i < n; ++i)
    s.cfg.stations.push_back ({sta, 0});
  s.cfg.apAcs.push_back ({ap, 1, mode});
  for (int i = 0; i < n; ++i)
    {
      FlowSpec f;
      f.id = i;
      f.station = i;
      f.saturated = true;
      s.flows.push_back (f);
    }
  FlowSpec d;
  d.id = n;
  d.direction = Direction::Down;
  d.station = 0;
  d.saturated = true;
  s.flows.push_back (d);
  return s;
}

void
checkConservation (const SimTrace &t)
{
  for (const auto &f : t.flows)
    CHECK (f.delivered + f.queueDrops + f.retryDrops + f.residual == f.enqueued);
}

} // namespace

TEST_CASE ("no traffic gives an all-idle trace")
{
  SimConfig cfg;
  cfg.stations.push_back ({edcaParams (2, 15), 0});
  cfg.horizon = 0.01;
  auto t = runSimulation (cfg, {});
  CHECK (t.successSlots == 0);
  CHECK (t.collisionSlots == 0);
  CHECK (t.idleSlots > 1000);
}

TEST_CASE ("same seed, same trace")
{
  auto s = saturated (5, edcaParams (2, 31), edcaParams (2, 31));
  s.cfg.horizon = 0.5;
  s.cfg.seed = 42;
  auto a = runSimulation (s.cfg, s.flows);
  auto b = runSimulation (s.cfg, s.flows);
  CHECK (a.idleSlots == b.idleSlots);
  CHECK (a.collisionSlots == b.collisionSlots);
  for (std::size_t i = 0; i < a.flows.size (); ++i)
    CHECK (a.flows[i].payloadBytes == b.flows[i].payloadBytes);
  s.cfg.seed = 43;
  auto c = runSimulation (s.cfg, s.flows);
  CHECK (c.idleSlots != a.idleSlots);
}

TEST_CASE ("frame conservation")
{
  auto s = saturated (10, edcaParams (2, 15, 2, 3), edcaParams (2, 15, 2, 3));
  s.cfg.horizon = 1.0;
  s.cfg.bufferPackets = 5;
  FlowSpec cbr;
  cbr.id = 11;
  cbr.direction = Direction::Down;
  cbr.station = 3;
  cbr.ratePps = 3000;
  s.flows.push_back (cbr);
  auto t = runSimulation (s.cfg, s.flows);
  checkConservation (t);
  CHECK (t.flows[0].retryDrops > 0);
  CHECK (t.flows[11].queueDrops > 0);
}

TEST_CASE ("slot limit")
{
  auto s = saturated (3, edcaParams (2, 15), edcaParams (2, 15));
  s.cfg.horizon = 100;
  s.cfg.maxSlots = 5000;
  s.cfg.recordSlotLog = true;
  auto t = runSimulation (s.cfg, s.flows);
  CHECK (t.totalSlots () == 5000);
  CHECK (t.slotLog.size () == 5000);
}

TEST_CASE ("symmetric stations share evenly")
{
  auto s = saturated (4, edcaParams (2, 31), edcaParams (2, 31));
  s.cfg.horizon = 20;
  auto t = runSimulation (s.cfg, s.flows);
  double lo = 1e18, hi = 0;
  for (int i = 0; i < 5; ++i)
    {
      lo = std::min (lo, t.flows[i].payloadBytes);
      hi = std::max (hi, t.flows[i].payloadBytes);
    }
  CHECK (lo / hi > 0.95);
}

TEST_CASE ("measured transmission probability matches the fixed point")
{
  struct Case { int n; double cwSta; double cwAp; int apAifsn; };
  for (auto c : {Case{5, 31, 31, 2}, Case{10, 63, 15, 2}, Case{5, 31, 15, 3}})
    {
      auto s = saturated (c.n, edcaParams (2, c.cwSta), edcaParams (c.apAifsn, c.cwAp));
      s.cfg.maxSlots = 400000;
      s.cfg.horizon = 1e6;
      auto t = runSimulation (s.cfg, s.flows);
      std::vector<TrafficClassParams> tcs = {edcaParams (2, c.cwSta), edcaParams (c.apAifsn, c.cwAp)};
      tcs[0].population = c.n;
      auto sol = analytics::solveFixedPoint (tcs);
      REQUIRE (sol.converged);
      for (int k = 0; k < 2; ++k)
        {
          const auto &st = t.perTc.at (k);
          const double tau = double (st.attempts) / st.eligibleSlots;
          INFO ("n=" << c.n << " tc=" << k << " sim=" << tau << " model=" << sol.tau[k]);
          CHECK (std::abs (tau / sol.tau[k] - 1) < 0.05);
        }
    }
}

TEST_CASE ("fractional AP windows are unbiased")
{
  auto s = saturated (5, edcaParams (2, 31), edcaParams (2, 22.4), BackoffMode::Fractional);
  s.cfg.horizon = 5;
  auto t = runSimulation (s.cfg, s.flows);
  const auto &ap = t.entities.back ();
  REQUIRE (ap.draws > 1000);
  CHECK (std::abs (ap.drawnWindowSum / ap.configuredWindowSum - 1) < 0.01);
}

TEST_CASE ("TXOP bursts deliver several frames per access")
{
  auto s = saturated (5, edcaParams (2, 31), edcaParams (2, 31, 4, 7, 4));
  s.cfg.horizon = 5;
  auto t = runSimulation (s.cfg, s.flows);
  const auto &ap = t.perTc.at (1);
  CHECK (ap.frames == 4 * ap.accesses);
  const auto &sta = t.perTc.at (0);
  CHECK (sta.frames == sta.accesses);
}

TEST_CASE ("TCP transfers complete")
{
  SimConfig cfg;
  cfg.stations.push_back ({edcaParams (2, 31), 0});
  cfg.stations.push_back ({edcaParams (2, 31), 0});
  cfg.apAcs.push_back ({edcaParams (2, 31), 1});
  cfg.horizon = 10;
  TrafficBinding flows;
  FlowSpec up;
  up.id = 0;
  up.transport = Transport::Tcp;
  up.station = 0;
  up.wiredDelay = 0.015;
  up.totalPackets = 500;
  FlowSpec down = up;
  down.id = 1;
  down.station = 1;
  down.direction = Direction::Down;
  flows = {up, down};
  auto t = runSimulation (cfg, flows);
  for (const auto &f : t.flows)
    {
      REQUIRE (f.completionTime.has_value ());
      CHECK (*f.completionTime < 5.0);
      CHECK (f.packets == 500);
      CHECK (f.slowStartForward > 0);
    }
  checkConservation (t);
}

TEST_CASE ("invalid configurations are rejected")
{
  SimConfig cfg;
  CHECK_THROWS_AS (runSimulation (cfg, {}), ConfigError);
  cfg.stations.push_back ({edcaParams (2, 31), 0});
  cfg.horizon = -1;
  CHECK_THROWS_AS (runSimulation (cfg, {}), ConfigError);
  cfg.horizon = 1;
  FlowSpec f;
  f.station = 4;
  f.ratePps = 10;
  CHECK_THROWS_AS (runSimulation (cfg, {f}), ConfigError);
}
