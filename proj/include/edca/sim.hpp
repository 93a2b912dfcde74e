#ifndef EDCA_SIM_HPP
#define EDCA_SIM_HPP

#include "edca/backoff.hpp"
#include "edca/params.hpp"
#include "edca/traffic.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace edca {

// ---------------------------------------------------------------------------
// Configuration

struct StationConfig
{
  TrafficClassParams edca;
  int tc = 0;  // statistics label
};

/// One access category queue at the AP. Lower index means higher priority.
struct ApAcConfig
{
  TrafficClassParams edca;
  int tc = 1;
  BackoffMode mode = BackoffMode::Standard;
};

struct SimConfig
{
  PhyTiming phy;
  std::vector<StationConfig> stations;
  std::vector<ApAcConfig> apAcs;
  int payloadBytes = 1500;
  int bufferPackets = 200;  // per queue; 0 means unbounded
  double horizon = 10.0;    // s
  std::optional<std::int64_t> maxSlots;  // stop after this many contention slots
  std::uint64_t seed = 1;
  double beaconInterval = 0.1;
  bool recordSlotLog = false;
  TcpConfig tcp;

  void validate () const;
};

// ---------------------------------------------------------------------------
// MAC building blocks

enum class FrameKind : std::uint8_t
{
  Data,
  TransportAck
};

struct FrameRecord
{
  int flowId = -1;
  int source = 0;       // node id; 0 is the AP
  int destination = 0;
  int payloadBytes = 0;
  double enqueueTime = 0.0;
  FrameKind kind = FrameKind::Data;
  std::int64_t seq = 0;  // transport sequence / ACK number
};

/**
 * EDCA backoff state of one queue (a station's single TC or one AP access
 * category). Stage k is the number of failed attempts of the head frame.
 */
class BackoffEntity
{
public:
  BackoffEntity (const TrafficClassParams &params, BackoffMode mode, std::size_t capacity);

  const TrafficClassParams &params () const { return m_params; }
  void setParams (const TrafficClassParams &p) { m_params = p; }
  BackoffMode mode () const { return m_mode; }

  int counter () const { return m_counter; }
  void setCounter (int c) { m_counter = c; }
  int stage () const { return m_stage; }

  /// Contention window for the current stage (may be fractional).
  double window () const { return m_params.window (m_stage); }
  /// Draws a fresh counter for the current stage.
  void drawCounter (Rng &rng);

  /// Successful exchange of the head frame: reset to CW_min and redraw.
  void onSuccess (Rng &rng);
  /// Failed attempt (external or internal collision). Returns true when the
  /// head frame hit the retry limit and must be dropped; the stage is reset then.
  bool onCollision (Rng &rng);

  std::deque<FrameRecord> &queue () { return m_queue; }
  const std::deque<FrameRecord> &queue () const { return m_queue; }
  std::size_t capacity () const { return m_capacity; }
  bool hasRoom () const { return m_capacity == 0 || m_queue.size () < m_capacity; }

  double drawnWindowSum () const { return m_drawnWindowSum; }
  double configuredWindowSum () const { return m_configuredWindowSum; }
  std::int64_t draws () const { return m_draws; }

private:
  TrafficClassParams m_params;
  BackoffMode m_mode;
  std::size_t m_capacity;
  int m_counter = 0;
  int m_stage = 0;
  std::deque<FrameRecord> m_queue;
  double m_drawnWindowSum = 0.0;
  double m_configuredWindowSum = 0.0;
  std::int64_t m_draws = 0;
};

enum class SlotOutcome : std::uint8_t
{
  Idle,
  Success,
  Collision
};

/// 0 physical transmitters: idle; 1: success; more: collision.
SlotOutcome classifySlot (std::size_t physicalTransmitters);

/// Among AP access categories whose counters expired in the same slot, the
/// highest-priority one (lowest index) gets the medium.
int virtualCollisionWinner (std::span<const int> readyAcs);

/// Frames sent in one channel access.
inline std::size_t
burstLength (int nTxop, std::size_t queued)
{
  return std::min<std::size_t> (static_cast<std::size_t> (nTxop), queued);
}

/// Medium time of a TXOP burst: each frame with its SIFS + ACK, SIFS between exchanges.
double burstDuration (const PhyTiming &phy, std::span<const int> payloads);

// ---------------------------------------------------------------------------
// Adaptation interface

struct AcObservation
{
  std::set<int> uplinkSources;         // stations heard by the AP
  std::set<int> downlinkDestinations;  // destinations of frames arriving from the wired side
  std::int64_t successesUp = 0;        // frames received by the AP
  std::int64_t successesDown = 0;      // frames delivered by the AP
  std::size_t apQueueLength = 0;
};

struct BeaconObservation
{
  double time = 0.0;
  std::vector<AcObservation> perAc;
};

/// Station-facing EDCA parameter set of one AC as carried in a beacon.
struct BeaconTuple
{
  double time = 0.0;
  int ac = 0;
  int aifsn = 0;
  int eCwMin = 0;
  int eCwMax = 0;
  int txop = 0;
};

struct IntervalRecord
{
  double time = 0.0;
  int ac = 0;
  double measuredU = 0.0;  // NaN when no uplink success was seen
  double cwMinAp = 0.0;
  int nTxopEffective = 1;
};

struct ApParamUpdate
{
  int ac = 0;
  TrafficClassParams params;
};

struct BeaconOutcome
{
  std::vector<ApParamUpdate> updates;
  std::vector<BeaconTuple> beacon;
  std::vector<IntervalRecord> intervals;
  std::vector<std::string> annotations;
};

/// Controller invoked by the simulation clock.
class AdaptationHook
{
public:
  virtual ~AdaptationHook () = default;
  /// Called at the end of every beacon interval with what the AP saw in it.
  virtual BeaconOutcome onBeacon (const BeaconObservation &obs) = 0;
  /// Packets the AP may send in the TXOP it just won for `ac`.
  virtual int effectiveTxop (int ac, int analyticTxop, std::size_t queueLength) = 0;
};

// ---------------------------------------------------------------------------
// Results

struct FlowStats
{
  int flowId = 0;
  std::int64_t enqueued = 0;     // frames offered to the MAC queue
  std::int64_t delivered = 0;    // frames delivered over the air
  std::int64_t queueDrops = 0;
  std::int64_t retryDrops = 0;
  std::int64_t residual = 0;     // frames still queued at the end
  double payloadBytes = 0.0;     // transport payload received by the sink
  std::int64_t packets = 0;      // transport packets received by the sink
  double delaySum = 0.0;         // MAC delay of data frames
  std::int64_t delayCount = 0;
  std::optional<double> completionTime;
  std::int64_t timeouts = 0;
  std::int64_t slowStartForward = 0;   // segments released by ACKs that arrived in slow start
  std::int64_t slowStartBackward = 0;  // ACKs that arrived while the sender was in slow start
};

struct TcStats
{
  std::int64_t attempts = 0;       // counter expiries (incl. internal collisions)
  std::int64_t eligibleSlots = 0;  // backlogged slots past the class's AIFS
  std::int64_t accesses = 0;       // successful channel accesses
  std::int64_t frames = 0;         // frames delivered
  std::int64_t collisions = 0;
};

struct EntityStats
{
  int node = 0;
  int ac = 0;
  int tc = 0;
  double drawnWindowSum = 0.0;
  double configuredWindowSum = 0.0;
  std::int64_t draws = 0;
};

struct SlotRecord
{
  SlotOutcome outcome = SlotOutcome::Idle;
  int tc = -1;  // winning class on success
};

struct SimTrace
{
  std::vector<FlowStats> flows;
  std::map<int, TcStats> perTc;
  std::vector<EntityStats> entities;
  std::int64_t idleSlots = 0;
  std::int64_t successSlots = 0;
  std::int64_t collisionSlots = 0;
  std::vector<SlotRecord> slotLog;
  std::vector<BeaconTuple> beacons;
  std::vector<IntervalRecord> intervals;
  std::vector<std::string> annotations;
  double endTime = 0.0;

  std::int64_t totalSlots () const { return idleSlots + successSlots + collisionSlots; }
};

/// Runs one deterministic simulation. Station ids are 1..N (index + 1), the AP is node 0.
SimTrace runSimulation (const SimConfig &cfg, const TrafficBinding &traffic, AdaptationHook *controller = nullptr);

} // namespace edca

#endif
