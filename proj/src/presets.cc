#include "edca/presets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace edca {

namespace {

TrafficClassParams
edca (double cwMin, double cwMax)
{
  TrafficClassParams p;
  p.aifsn = 2;
  p.cwMin = cwMin;
  p.m = stagesFor (cwMin, cwMax);
  p.retryLimit = 7;
  p.nTxop = 1;
  return p;
}

int
scaled (int base, double scale)
{
  return std::max (1, static_cast<int> (std::lround (base * scale)));
}

constexpr double kUdpLoadPerDirection = 24e6;  // bits/s, spread over the group
constexpr double kEqualRtt = 0.030;
constexpr double kFirstTcpRtt = 0.024;
constexpr double kTcpRttStep = 0.004;

// Wired delays are given as round trips; the simulator wants one way.
double
oneWay (double rtt)
{
  return rtt / 2.0;
}

void
addDataAcs (ScenarioSpec &s)
{
  s.acs.push_back ({"data-udp", AcKind::Udp, edca (31, 511), std::nullopt});
  s.acs.push_back ({"data-tcp", AcKind::Tcp, edca (63, 1023), std::nullopt});
}

void
scaleQueues (ScenarioSpec &s, double scale)
{
  if (scale < 1.0)
    {
      s.bufferPackets = std::max (10, static_cast<int> (std::lround (200 * scale)));
      s.adaptation.th = static_cast<std::size_t> (std::max (4L, std::lround (50 * scale)));
    }
}

// UDP CBR flows of one direction; start phases are spread over one packet
// period so that equal-rate sources do not hit the AP queue in lock step.
void
addUdpGroup (ScenarioSpec &s, Direction d, int ac, int count, double start, double startStep)
{
  const double rate = kUdpLoadPerDirection / count;
  const double period = 1500 * 8.0 / rate;
  for (int k = 0; k < count; ++k)
    {
      FlowRow f;
      f.direction = d;
      f.transport = Transport::Udp;
      f.ac = ac;
      f.rateBps = rate;
      f.start = start + k * startStep + period * k / count;
      f.wiredDelay = oneWay (kEqualRtt);
      s.flows.push_back (f);
    }
}

void
addTcpGroup (ScenarioSpec &s, Direction d, int ac, int count, double start, double startStep, bool staggerDelay,
             bool alternateShort)
{
  for (int k = 0; k < count; ++k)
    {
      FlowRow f;
      f.direction = d;
      f.transport = Transport::Tcp;
      f.ac = ac;
      f.start = start + k * startStep;
      f.wiredDelay = oneWay (staggerDelay ? kFirstTcpRtt + k * kTcpRttStep : kEqualRtt);
      if (alternateShort && k % 2 == 0)
        f.packets = 31;
      s.flows.push_back (f);
    }
}

ScenarioSpec
simultaneous (int id, double scale, bool staggerDelay)
{
  ScenarioSpec s;
  s.name = "experiment-" + std::to_string (id);
  addDataAcs (s);
  const int n = scaled (10, scale);
  addUdpGroup (s, Direction::Up, 0, n, 0.0, 0.0);
  addUdpGroup (s, Direction::Down, 0, n, 0.0, 0.0);
  addTcpGroup (s, Direction::Up, 1, n, 0.0, 0.0, staggerDelay, false);
  addTcpGroup (s, Direction::Down, 1, n, 0.0, 0.0, staggerDelay, false);
  s.horizon = scale < 1.0 ? 30.0 : 100.0;
  scaleQueues (s, scale);
  return s;
}

// New flows of each type every 10 s from fixed offsets.
ScenarioSpec
arrivals (int id, double scale, int perType, double nominalHorizon, bool staggerDelay, bool shortFlows)
{
  ScenarioSpec s;
  s.name = "experiment-" + std::to_string (id);
  addDataAcs (s);
  const int n = scaled (perType, scale);
  const double step = 10.0;
  addUdpGroup (s, Direction::Down, 0, n, 5.0, step);
  addUdpGroup (s, Direction::Up, 0, n, 10.0, step);
  addTcpGroup (s, Direction::Up, 1, n, 7.0, step, staggerDelay, shortFlows);
  addTcpGroup (s, Direction::Down, 1, n, 12.0, step, staggerDelay, shortFlows);
  // no arrivals after the cutoff (200 s / 300 s at full scale)
  const double cutoff = step * n;
  std::erase_if (s.flows, [cutoff] (const FlowRow &f) { return f.start > cutoff + 1e-9; });
  double last = 0.0;
  for (const auto &f : s.flows)
    last = std::max (last, f.start);
  s.horizon = std::max (std::round (nominalHorizon * scale), std::ceil (last) + 20.0);
  scaleQueues (s, scale);
  return s;
}

ScenarioSpec
multimedia (double scale)
{
  ScenarioSpec s = simultaneous (7, scale, false);
  s.name = "experiment-7";
  // realtime ACs go in front; shift the data flows' AC indices
  for (auto &f : s.flows)
    f.ac += 2;
  s.acs.insert (s.acs.begin (), {{"voice", AcKind::Realtime, edca (7, 15), std::nullopt},
                                 {"video", AcKind::Realtime, edca (15, 31), std::nullopt}});
  const int n = scaled (10, scale);
  for (auto d : {Direction::Up, Direction::Down})
    for (int k = 0; k < n; ++k)
      {
        FlowRow voice;
        voice.direction = d;
        voice.ac = 0;
        voice.rateBps = 24e3;
        voice.packetBytes = 60;
        voice.start = 0.02 * k / n;
        voice.wiredDelay = oneWay (kEqualRtt);
        s.flows.push_back (voice);

        // variable-size frames at a fixed interval: mean 2419 B, max 3112 B, 255 kb/s
        FlowRow video;
        video.direction = d;
        video.ac = 1;
        video.rateBps = 255e3;
        video.packetBytes = 2 * 2419 - 3112;
        video.maxPacketBytes = 3112;
        video.start = 0.076 * k / n;
        video.wiredDelay = oneWay (kEqualRtt);
        s.flows.push_back (video);
      }
  return s;
}

} // namespace

ScenarioSpec
experimentPreset (int id, double scale)
{
  if (!(scale > 0.0))
    throw ConfigError ("preset: scale must be positive");
  ScenarioSpec s;
  switch (id)
    {
    case 1:
      s = simultaneous (1, scale, false);
      break;
    case 2:
      s = simultaneous (2, scale, true);
      break;
    case 3:
      s = arrivals (3, scale, 20, 300.0, false, false);
      break;
    case 4:
      s = arrivals (4, scale, 20, 300.0, true, false);
      break;
    case 5:
      s = arrivals (5, scale, 30, 450.0, false, true);
      break;
    case 6:
      s = arrivals (6, scale, 30, 450.0, true, true);
      break;
    case 7:
      s = multimedia (scale);
      break;
    default:
      throw ConfigError ("preset: unknown experiment id " + std::to_string (id) + " (1..7)");
    }
  s.validate ();
  return s;
}

} // namespace edca
