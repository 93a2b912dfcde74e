#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edca/adapt.hpp"

#include <cmath>

using namespace edca;

namespace {

TrafficClassParams
edcaParams (int aifsn, double cw, int m = 4, int txop = 1)
{
  TrafficClassParams p;
  p.aifsn = aifsn;
  p.cwMin = cw;
  p.m = m;
  p.nTxop = txop;
  return p;
}

} // namespace

TEST_CASE ("flow registry")
{
  FlowRegistry r;
  CHECK (r.update ({1, 2}, {3}));
  CHECK (r.nUplink () == 2);
  CHECK (r.nDownlink () == 1);
  CHECK_FALSE (r.update ({1, 2}, {3}));
  CHECK (r.update ({1, 2, 4}, {3}));
  CHECK (r.nUplink () == 3);
  CHECK (r.update ({}, {}));
  CHECK (r.nUplink () == 0);
  CHECK (r.nDownlink () == 0);
}

TEST_CASE ("required utilization")
{
  CHECK (*requiredUtilization (10, 10) == 1.0);
  CHECK (*requiredUtilization (4, 2) == 0.5);
  CHECK (*requiredUtilization (3, 7) == doctest::Approx (7.0 / 3));
  CHECK_FALSE (requiredUtilization (0, 5).has_value ());
}

TEST_CASE ("fine tuning dead band")
{
  CHECK (fineTuneStep (1.0, 0.4, 0.5) == -1);
  CHECK (fineTuneStep (1.0, 1.2, 0.5) == 0);
  CHECK (fineTuneStep (1.0, 0.5, 0.5) == 0);
  CHECK (fineTuneStep (1.0, 1.5, 0.5) == 0);
  CHECK (fineTuneStep (1.0, 1.6, 0.5) == 1);
  CHECK (fineTuneStep (2.0, 0.9, 0.5) == -1);
}

TEST_CASE ("TXOP pressure toggles exactly at the threshold")
{
  CHECK (txopPressureControl (60, 50, 2) == 4);
  CHECK (txopPressureControl (10, 50, 2) == 2);
  const std::size_t trace[] = {40, 49, 50, 51, 70, 51, 50, 30, 55, 50};
  const int expect[] = {1, 1, 1, 2, 2, 2, 1, 1, 2, 1};
  for (std::size_t i = 0; i < std::size (trace); ++i)
    CHECK (txopPressureControl (trace[i], 50, 1) == expect[i]);
}

TEST_CASE ("station CW encoding")
{
  CHECK (encodeStationCw (31).exponent == 5);
  CHECK (encodeStationCw (31).value == 31);
  CHECK (encodeStationCw (100).exponent == 7);
  CHECK (encodeStationCw (100).value == 127);
  CHECK (encodeStationCw (0).exponent == 0);
  CHECK (encodeStationCw (32767).exponent == 15);
  CHECK_THROWS_AS (encodeStationCw (40000), ConfigError);
  for (int cw = 0; cw <= 5000; cw += 7)
    {
      auto e = encodeStationCw (cw);
      CHECK (e.value >= cw);
      CHECK (e.value == (1 << e.exponent) - 1);
    }
}

TEST_CASE ("QoS guard")
{
  CHECK (qosGuard (20, {7, 15}));
  CHECK_FALSE (qosGuard (5, {7}));
  CHECK (qosGuard (5, {}));
}

TEST_CASE ("controller recomputes on arrival and idles without uplink")
{
  AcSetup udp{AcKind::Udp, edcaParams (2, 31), edcaParams (2, 31)};
  AdaptationConfig cfg;
  cfg.beta = 2;
  AdaptiveController c ({udp}, cfg, ControllerMode::Full);
  BeaconObservation obs;
  obs.perAc.resize (1);
  obs.perAc[0].downlinkDestinations = {1, 2};
  obs.time = 0.1;
  auto out = c.onBeacon (obs);
  CHECK (out.updates.empty ());
  CHECK (out.intervals.empty ());
  obs.time = 0.2;
  out = c.onBeacon (obs);
  CHECK (out.updates.empty ());  // no uplink source: nothing to balance
  REQUIRE (out.intervals.size () == 1);
  CHECK (std::isnan (out.intervals[0].measuredU));

  obs.perAc[0].uplinkSources = {1, 2, 3, 4};
  obs.perAc[0].successesUp = 100;
  obs.perAc[0].successesDown = 50;
  c.onBeacon (obs);
  out = c.onBeacon (obs);
  REQUIRE (out.updates.size () == 1);
  const auto plan = analytics::computeApParameters (edcaParams (2, 31), 4, 0.5);
  CHECK (out.updates[0].params.cwMin == doctest::Approx (plan.cwMin));

  // same population, measured ratio inside the dead band: nothing moves
  c.onBeacon (obs);
  out = c.onBeacon (obs);
  CHECK (out.updates.empty ());

  // measured ratio too low: CW_min steps down by one
  obs.perAc[0].successesDown = 10;
  c.onBeacon (obs);
  out = c.onBeacon (obs);
  REQUIRE (out.updates.size () == 1);
  CHECK (out.updates[0].params.cwMin == doctest::Approx (plan.cwMin - 1));
}

TEST_CASE ("TCP categories are never CW-tuned")
{
  AcSetup tcp{AcKind::Tcp, edcaParams (2, 63), edcaParams (2, 63)};
  AdaptationConfig cfg;
  cfg.beta = 1;
  AdaptiveController c ({tcp}, cfg, ControllerMode::Full);
  BeaconObservation obs;
  obs.perAc.resize (1);
  obs.perAc[0].uplinkSources = {1, 2};
  obs.perAc[0].downlinkDestinations = {1, 2};
  obs.perAc[0].successesUp = 100;
  obs.perAc[0].successesDown = 1;
  auto first = c.onBeacon (obs);
  CHECK (first.updates.size () == 1);
  for (int i = 0; i < 20; ++i)
    CHECK (c.onBeacon (obs).updates.empty ());
  CHECK (c.effectiveTxop (0, 1, 51) == 2);
  CHECK (c.effectiveTxop (0, 1, 50) == 1);
}

TEST_CASE ("realtime categories stay static and bound the data category")
{
  AcSetup voice{AcKind::Realtime, edcaParams (2, 7, 1), edcaParams (2, 7, 1)};
  AcSetup udp{AcKind::Udp, edcaParams (2, 7, 1), edcaParams (2, 7, 1)};
  AdaptationConfig cfg;
  cfg.beta = 1;
  AdaptiveController c ({voice, udp}, cfg, ControllerMode::Full);
  BeaconObservation obs;
  obs.perAc.resize (2);
  obs.perAc[0].uplinkSources = {1};
  obs.perAc[0].downlinkDestinations = {1};
  obs.perAc[1].uplinkSources = {2};
  obs.perAc[1].downlinkDestinations = {2, 3, 4, 5, 6, 7, 8};
  auto out = c.onBeacon (obs);
  REQUIRE (out.updates.size () == 1);
  CHECK (out.updates[0].ac == 1);
  CHECK (out.updates[0].params.cwMin >= 7);
  CHECK (out.updates[0].params.nTxop > 1);
  CHECK (c.apParams (0).cwMin == 7);
}

TEST_CASE ("beacon payload carries encodable station CWs")
{
  AcSetup udp{AcKind::Udp, edcaParams (2, 31), edcaParams (2, 31)};
  AdaptiveController c ({udp}, {}, ControllerMode::Analytic);
  BeaconObservation obs;
  obs.perAc.resize (1);
  auto out = c.onBeacon (obs);
  REQUIRE (out.beacon.size () == 1);
  CHECK (out.beacon[0].eCwMin == 5);
  CHECK (out.beacon[0].eCwMax == 9);
  CHECK (out.beacon[0].aifsn == 2);
}

TEST_CASE ("closed loop: adaptive AP balances saturated UDP")
{
  SimConfig cfg;
  const auto sta = edcaParams (2, 31);
  for (int i = 0; i < 8; ++i)
    cfg.stations.push_back ({sta, 0});
  cfg.apAcs.push_back ({sta, 1, BackoffMode::Fractional});
  cfg.horizon = 20;
  TrafficBinding flows;
  for (int i = 0; i < 4; ++i)
    {
      FlowSpec up;
      up.id = i;
      up.station = i;
      up.ratePps = 2000;
      flows.push_back (up);
      FlowSpec down;
      down.id = 4 + i;
      down.station = 4 + i;
      down.direction = Direction::Down;
      down.ratePps = 2000;
      flows.push_back (down);
    }
  AdaptiveController c ({{AcKind::Udp, sta, sta}}, {}, ControllerMode::Full);
  auto t = runSimulation (cfg, flows, &c);
  double up = 0, down = 0;
  for (int i = 0; i < 8; ++i)
    (i % 2 == 0 ? up : down) += t.flows[i].payloadBytes;
  INFO ("down/up = " << down / up);
  CHECK (std::abs (down / up - 1) < 0.1);
  CHECK (c.apParams (0).cwMin < 31);
}
