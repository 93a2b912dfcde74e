#ifndef EDCA_SCENARIO_HPP
#define EDCA_SCENARIO_HPP

#include "edca/adapt.hpp"
#include "edca/sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace edca {

struct AcSpec
{
  std::string name;
  AcKind kind = AcKind::Udp;
  TrafficClassParams station;
  /// AP parameters before any adaptation; the station's when absent.
  std::optional<TrafficClassParams> ap;

  const TrafficClassParams &apParams () const { return ap ? *ap : station; }
};

/// One flow row. Every flow runs on its own station.
struct FlowRow
{
  Direction direction = Direction::Up;
  Transport transport = Transport::Udp;
  int ac = 0;
  double start = 0.0;
  double wiredDelay = 0.0;  // one way, s
  double rateBps = 0.0;     // UDP offered load
  bool saturated = false;
  int packetBytes = 1500;
  int maxPacketBytes = 0;
  std::int64_t packets = 0; // TCP transfer size, 0 = bulk
};

struct ScenarioSpec
{
  std::string name = "scenario";
  std::vector<AcSpec> acs;  // priority order, highest first
  std::vector<FlowRow> flows;
  double horizon = 30.0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int bufferPackets = 200;
  BackoffMode apBackoff = BackoffMode::Fractional;
  AdaptationConfig adaptation;
  TcpConfig tcp;
  PhyTiming phy;

  void validate () const;
};

/// Reads the JSON scenario format documented in the README. `scale`
/// multiplies every flow row's count (at least one flow per row is kept).
ScenarioSpec parseScenario (const std::string &jsonText, double scale = 1.0);
ScenarioSpec loadScenario (const std::string &path, double scale = 1.0);

/// Inverse of parseScenario (one row per flow).
std::string scenarioToJson (const ScenarioSpec &spec);

enum class RunMode
{
  Off,       // AP keeps its initial (default EDCA) parameters
  Analytic,  // model recompute on population change
  Adaptive   // plus CW fine tuning and TXOP pressure control
};

RunMode parseRunMode (const std::string &s);
std::string toString (RunMode m);

/// Simulator input for one seed. Station k carries flow k.
SimConfig buildSimConfig (const ScenarioSpec &spec, std::uint64_t seed);
TrafficBinding buildTraffic (const ScenarioSpec &spec);

} // namespace edca

#endif
