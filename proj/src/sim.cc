#include "edca/sim.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

namespace edca {

void
SimConfig::validate () const
{
  phy.validate ();
  tcp.validate ();
  if (stations.empty ())
    throw ConfigError ("SimConfig: at least one station is required");
  for (const auto &s : stations)
    s.edca.validate ();
  for (const auto &a : apAcs)
    {
      a.edca.validate ();
      if (a.mode == BackoffMode::Standard && a.edca.cwMin != std::floor (a.edca.cwMin))
        throw ConfigError ("SimConfig: standard backoff needs an integer CW_min");
    }
  for (const auto &s : stations)
    if (s.edca.cwMin != std::floor (s.edca.cwMin))
      throw ConfigError ("SimConfig: station CW_min must be an integer");
  if (payloadBytes <= 0)
    throw ConfigError ("SimConfig: payload size must be positive");
  if (bufferPackets < 0)
    throw ConfigError ("SimConfig: negative buffer size");
  if (!(horizon > 0.0))
    throw ConfigError ("SimConfig: horizon must be positive");
  if (maxSlots && *maxSlots <= 0)
    throw ConfigError ("SimConfig: maxSlots must be positive");
  if (!(beaconInterval > 0.0))
    throw ConfigError ("SimConfig: beacon interval must be positive");
}

// ---------------------------------------------------------------------------

BackoffEntity::BackoffEntity (const TrafficClassParams &params, BackoffMode mode, std::size_t capacity)
  : m_params (params), m_mode (mode), m_capacity (capacity)
{
}

void
BackoffEntity::drawCounter (Rng &rng)
{
  const double w = window ();
  int drawnWindow;
  if (m_mode == BackoffMode::Fractional)
    drawnWindow = fractionalWindow (w, rng);
  else
    drawnWindow = static_cast<int> (std::lround (w));
  m_counter = backoffDrawStandard (drawnWindow, rng);
  m_drawnWindowSum += drawnWindow;
  m_configuredWindowSum += w;
  ++m_draws;
}

void
BackoffEntity::onSuccess (Rng &rng)
{
  m_stage = 0;
  drawCounter (rng);
}

bool
BackoffEntity::onCollision (Rng &rng)
{
  ++m_stage;
  bool drop = false;
  if (m_stage >= m_params.retryLimit)
    {
      drop = true;
      m_stage = 0;
    }
  drawCounter (rng);
  return drop;
}

SlotOutcome
classifySlot (std::size_t physicalTransmitters)
{
  if (physicalTransmitters == 0)
    return SlotOutcome::Idle;
  return physicalTransmitters == 1 ? SlotOutcome::Success : SlotOutcome::Collision;
}

int
virtualCollisionWinner (std::span<const int> readyAcs)
{
  if (readyAcs.empty ())
    return -1;
  return *std::min_element (readyAcs.begin (), readyAcs.end ());
}

double
burstDuration (const PhyTiming &phy, std::span<const int> payloads)
{
  double t = 0.0;
  for (std::size_t k = 0; k < payloads.size (); ++k)
    {
      if (k > 0)
        t += phy.sifs;
      t += phy.exchangeDuration (payloads[k]);
    }
  return t;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity ();

struct Event
{
  double time;
  std::uint64_t seq;
  std::function<void ()> fn;
};

struct EventLater
{
  bool operator() (const Event &a, const Event &b) const
  {
    return a.time > b.time || (a.time == b.time && a.seq > b.seq);
  }
};

struct MacQueue
{
  BackoffEntity be;
  int node;
  int ac;
  int tc;
  bool isAp;
  int offset = 0;            // AIFSN - AIFSN_min
  int saturatedFlow = -1;
  TcStats *stats = nullptr;  // cached entry of SimTrace::perTc
};

struct FlowRuntime
{
  FlowSpec spec;
  FlowStats stats;
  int stationQueue = -1;
  int apQueue = -1;
  TcpConnState tcp;
  TcpReceiver rx;
  std::uint64_t timerEpoch = 0;
  std::int64_t nextCbr = 0;
  Rng sizeRng;
  bool active = false;
};

std::uint64_t
mixSeed (std::uint64_t seed, std::uint64_t salt)
{
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Engine
{
public:
  Engine (const SimConfig &cfg, const TrafficBinding &traffic, AdaptationHook *hook);
  SimTrace run ();

private:
  void schedule (double t, std::function<void ()> fn);
  void processEventsUpTo (double t);
  double nextEventTime () const { return m_events.empty () ? kInf : m_events.top ().time; }

  void recomputeOffsets ();
  int txSlot (const MacQueue &q) const;
  void advanceIdle (int to);
  void resolveSlot (int slot);

  bool enqueue (int queueIdx, const FrameRecord &f);
  void topUp (int queueIdx, std::size_t want);
  FrameRecord makeData (FlowRuntime &fl, int src, int dst, std::int64_t seq);
  int dataSize (FlowRuntime &fl);

  void onDelivered (int queueIdx, const FrameRecord &f, double t);
  void onRetryDrop (const FrameRecord &f);

  void startFlow (int f);
  void cbrTick (int f);
  void apArrival (int f, const FrameRecord &frame);
  void tcpSend (int f, std::int64_t seq);
  void tcpSenderAck (int f, std::int64_t ack);
  void tcpReceiverData (int f, std::int64_t seq);
  void armTimer (int f);
  void onBeacon ();

  const SimConfig &m_cfg;
  AdaptationHook *m_hook;
  Rng m_rng;
  std::vector<MacQueue> m_queues;
  std::vector<int> m_stationTx;
  std::vector<int> m_apReady;
  std::vector<FlowRuntime> m_flows;
  std::priority_queue<Event, std::vector<Event>, EventLater> m_events;
  std::uint64_t m_eventSeq = 0;
  double m_now = 0.0;
  int m_aifsnMin = 2;
  int m_slot = 1;           // next undecided backoff slot
  double m_slotStart = 0.0; // start time of m_slot
  std::vector<AcObservation> m_obs;
  SimTrace m_trace;
};

Engine::Engine (const SimConfig &cfg, const TrafficBinding &traffic, AdaptationHook *hook)
  : m_cfg (cfg), m_hook (hook), m_rng (mixSeed (cfg.seed, 0))
{
  const std::size_t cap = static_cast<std::size_t> (cfg.bufferPackets);
  for (std::size_t s = 0; s < cfg.stations.size (); ++s)
    m_queues.push_back ({BackoffEntity (cfg.stations[s].edca, BackoffMode::Standard, cap), static_cast<int> (s) + 1, 0,
                         cfg.stations[s].tc, false});
  for (std::size_t a = 0; a < cfg.apAcs.size (); ++a)
    m_queues.push_back ({BackoffEntity (cfg.apAcs[a].edca, cfg.apAcs[a].mode, cap), 0, static_cast<int> (a),
                         cfg.apAcs[a].tc, true});
  m_obs.resize (cfg.apAcs.size ());

  for (const auto &spec : traffic)
    {
      spec.validate ();
      if (spec.station < 0 || spec.station >= static_cast<int> (cfg.stations.size ()))
        throw ConfigError ("flow " + std::to_string (spec.id) + ": unknown station");
      if (spec.ac < 0 || spec.ac >= static_cast<int> (cfg.apAcs.size ()))
        {
          const bool needsAp = spec.direction == Direction::Down || spec.transport == Transport::Tcp;
          if (needsAp)
            throw ConfigError ("flow " + std::to_string (spec.id) + ": unknown AP access category");
        }
      FlowRuntime fl;
      fl.spec = spec;
      fl.stats.flowId = spec.id;
      fl.stationQueue = spec.station;
      fl.apQueue = spec.ac >= 0 && spec.ac < static_cast<int> (cfg.apAcs.size ())
                       ? static_cast<int> (cfg.stations.size ()) + spec.ac
                       : -1;
      fl.tcp = TcpConnState::make (cfg.tcp, spec.totalPackets);
      fl.sizeRng.seed (mixSeed (cfg.seed, 1000 + static_cast<std::uint64_t> (spec.id)));
      m_flows.push_back (std::move (fl));
      m_queues[spec.station].ac = spec.ac;
    }
  for (std::size_t f = 0; f < m_flows.size (); ++f)
    {
      const auto &spec = m_flows[f].spec;
      if (spec.saturated)
        {
          const int q = spec.direction == Direction::Up ? m_flows[f].stationQueue : m_flows[f].apQueue;
          if (m_queues[q].saturatedFlow >= 0)
            throw ConfigError ("two saturated flows share one queue");
          m_queues[q].saturatedFlow = static_cast<int> (f);
        }
    }
}

void
Engine::schedule (double t, std::function<void ()> fn)
{
  m_events.push ({t, m_eventSeq++, std::move (fn)});
}

void
Engine::processEventsUpTo (double t)
{
  while (!m_events.empty () && m_events.top ().time <= t)
    {
      // copy out before pop; the handler may push new events
      Event ev = m_events.top ();
      m_events.pop ();
      m_now = ev.time;
      ev.fn ();
    }
}

void
Engine::recomputeOffsets ()
{
  m_aifsnMin = std::numeric_limits<int>::max ();
  for (const auto &q : m_queues)
    m_aifsnMin = std::min (m_aifsnMin, q.be.params ().aifsn);
  for (auto &q : m_queues)
    q.offset = q.be.params ().aifsn - m_aifsnMin;
}

int
Engine::txSlot (const MacQueue &q) const
{
  return std::max (m_slot, q.offset + 1) + q.be.counter ();
}

void
Engine::advanceIdle (int to)
{
  const int idle = to - m_slot;
  if (idle <= 0)
    return;
  for (auto &q : m_queues)
    {
      const int eligible = std::max (0, to - std::max (m_slot, q.offset + 1));
      if (eligible == 0)
        continue;
      q.be.setCounter (std::max (0, q.be.counter () - eligible));
      if (!q.be.queue ().empty ())
        q.stats->eligibleSlots += eligible;
    }
  m_trace.idleSlots += idle;
  if (m_cfg.recordSlotLog)
    m_trace.slotLog.insert (m_trace.slotLog.end (), idle, SlotRecord{SlotOutcome::Idle, -1});
  m_slot = to;
  m_slotStart += idle * m_cfg.phy.slotTime;
}

void
Engine::resolveSlot (int slot)
{
  auto &stationTx = m_stationTx;
  auto &apReady = m_apReady;  // AC indices
  stationTx.clear ();
  apReady.clear ();
  for (std::size_t i = 0; i < m_queues.size (); ++i)
    {
      auto &q = m_queues[i];
      if (slot < q.offset + 1)
        continue;
      if (q.be.queue ().empty ())
        {
          q.be.setCounter (std::max (0, q.be.counter () - 1));
          continue;
        }
      q.stats->eligibleSlots += 1;
      if (q.be.counter () != 0)
        {
          // EDCA counts the slot that ends AIFS even when the medium then
          // turns busy, so a busy slot still costs one decrement
          q.be.setCounter (q.be.counter () - 1);
          continue;
        }
      q.stats->attempts += 1;
      if (q.isAp)
        apReady.push_back (q.ac);
      else
        stationTx.push_back (static_cast<int> (i));
    }

  auto &physical = stationTx;
  if (!apReady.empty ())
    {
      const int winner = virtualCollisionWinner (apReady);
      const int base = static_cast<int> (m_cfg.stations.size ());
      for (int ac : apReady)
        {
          if (ac == winner)
            continue;
          auto &loser = m_queues[base + ac];
          loser.stats->collisions += 1;
          if (loser.be.onCollision (m_rng))
            {
              onRetryDrop (loser.be.queue ().front ());
              loser.be.queue ().pop_front ();
            }
        }
      physical.push_back (base + winner);
    }

  const double start = m_slotStart;
  const auto outcome = classifySlot (physical.size ());
  double duration = 0.0;
  if (outcome == SlotOutcome::Success)
    {
      const int qi = physical.front ();
      auto &q = m_queues[qi];
      int nTxop = q.be.params ().nTxop;
      if (q.isAp && m_hook)
        nTxop = m_hook->effectiveTxop (q.ac, nTxop, q.be.queue ().size ());
      if (q.saturatedFlow >= 0)
        topUp (qi, static_cast<std::size_t> (nTxop));
      const std::size_t n = burstLength (nTxop, q.be.queue ().size ());
      double t = start;
      for (std::size_t k = 0; k < n; ++k)
        {
          if (k > 0)
            t += m_cfg.phy.sifs;
          FrameRecord f = q.be.queue ().front ();
          q.be.queue ().pop_front ();
          t += m_cfg.phy.exchangeDuration (f.payloadBytes);
          m_flows[f.flowId].stats.delivered += 1;
          schedule (t, [this, qi, f, t] { onDelivered (qi, f, t); });
        }
      duration = t - start;
      auto &st = *q.stats;
      st.accesses += 1;
      st.frames += static_cast<std::int64_t> (n);
      q.be.onSuccess (m_rng);
      if (q.saturatedFlow >= 0)
        topUp (qi, 1);
      m_trace.successSlots += 1;
      if (m_cfg.recordSlotLog)
        m_trace.slotLog.push_back ({SlotOutcome::Success, q.tc});
    }
  else
    {
      double longest = 0.0;
      for (int qi : physical)
        longest = std::max (longest, m_cfg.phy.dataFrameDuration (m_queues[qi].be.queue ().front ().payloadBytes));
      duration = longest + m_cfg.phy.sifs + m_cfg.phy.ackDuration ();
      for (int qi : physical)
        {
          auto &q = m_queues[qi];
          q.stats->collisions += 1;
          if (q.be.onCollision (m_rng))
            {
              onRetryDrop (q.be.queue ().front ());
              q.be.queue ().pop_front ();
              if (q.saturatedFlow >= 0)
                topUp (qi, 1);
            }
        }
      m_trace.collisionSlots += 1;
      if (m_cfg.recordSlotLog)
        m_trace.slotLog.push_back ({SlotOutcome::Collision, -1});
    }

  const double busyEnd = start + duration;
  m_slot = 1;
  m_slotStart = busyEnd + m_cfg.phy.aifs (m_aifsnMin);
}

bool
Engine::enqueue (int queueIdx, const FrameRecord &f)
{
  auto &q = m_queues[queueIdx];
  auto &st = m_flows[f.flowId].stats;
  st.enqueued += 1;
  if (!q.be.hasRoom ())
    {
      st.queueDrops += 1;
      return false;
    }
  q.be.queue ().push_back (f);
  return true;
}

int
Engine::dataSize (FlowRuntime &fl)
{
  if (fl.spec.maxPacketBytes > fl.spec.packetBytes)
    return std::uniform_int_distribution<int> (fl.spec.packetBytes, fl.spec.maxPacketBytes) (fl.sizeRng);
  return fl.spec.packetBytes;
}

FrameRecord
Engine::makeData (FlowRuntime &fl, int src, int dst, std::int64_t seq)
{
  FrameRecord f;
  f.flowId = static_cast<int> (&fl - m_flows.data ());
  f.source = src;
  f.destination = dst;
  f.payloadBytes = dataSize (fl);
  f.enqueueTime = m_now;
  f.kind = FrameKind::Data;
  f.seq = seq;
  return f;
}

void
Engine::topUp (int queueIdx, std::size_t want)
{
  auto &q = m_queues[queueIdx];
  auto &fl = m_flows[q.saturatedFlow];
  if (!fl.active)
    return;
  const int stationNode = fl.spec.station + 1;
  while (q.be.queue ().size () < want && q.be.hasRoom ())
    {
      const auto f = fl.spec.direction == Direction::Up ? makeData (fl, stationNode, 0, 0)
                                                         : makeData (fl, 0, stationNode, 0);
      enqueue (queueIdx, f);
    }
}

void
Engine::onRetryDrop (const FrameRecord &f)
{
  m_flows[f.flowId].stats.retryDrops += 1;
}

void
Engine::onDelivered (int queueIdx, const FrameRecord &f, double t)
{
  auto &fl = m_flows[f.flowId];
  auto &st = fl.stats;
  const auto &q = m_queues[queueIdx];
  if (f.kind == FrameKind::Data)
    {
      st.delaySum += t - f.enqueueTime;
      st.delayCount += 1;
    }
  const int f_idx = f.flowId;

  if (!q.isAp)
    {
      // received by the AP
      if (q.ac >= 0 && q.ac < static_cast<int> (m_obs.size ()))
        {
          m_obs[q.ac].uplinkSources.insert (f.source);
          m_obs[q.ac].successesUp += 1;
        }
    }
  else
    m_obs[q.ac].successesDown += 1;

  const double wired = fl.spec.wiredDelay;
  if (fl.spec.transport == Transport::Udp)
    {
      if (fl.spec.direction == Direction::Up)
        schedule (t + wired, [this, f_idx, bytes = f.payloadBytes] {
          m_flows[f_idx].stats.payloadBytes += bytes;
          m_flows[f_idx].stats.packets += 1;
        });
      else
        {
          st.payloadBytes += f.payloadBytes;
          st.packets += 1;
        }
      return;
    }

  // TCP
  if (fl.spec.direction == Direction::Up)
    {
      if (f.kind == FrameKind::Data)
        {
          schedule (t + wired, [this, f_idx, seq = f.seq] { tcpReceiverData (f_idx, seq); });
        }
      else
        tcpSenderAck (f_idx, f.seq);
    }
  else
    {
      if (f.kind == FrameKind::Data)
        tcpReceiverData (f_idx, f.seq);
      else
        schedule (t + wired, [this, f_idx, ack = f.seq] { tcpSenderAck (f_idx, ack); });
    }
}

void
Engine::apArrival (int f, const FrameRecord &frame)
{
  auto &fl = m_flows[f];
  auto &obs = m_obs[fl.spec.ac];
  obs.downlinkDestinations.insert (frame.destination);
  FrameRecord fr = frame;
  fr.enqueueTime = m_now;
  enqueue (fl.apQueue, fr);
}

void
Engine::startFlow (int f)
{
  auto &fl = m_flows[f];
  fl.active = true;
  if (fl.spec.transport == Transport::Udp)
    {
      if (fl.spec.saturated)
        {
          const int qi = fl.spec.direction == Direction::Up ? fl.stationQueue : fl.apQueue;
          topUp (qi, 1);
        }
      else
        cbrTick (f);
      return;
    }
  for (auto seq : tcpStart (fl.tcp))
    tcpSend (f, seq);
  armTimer (f);
}

void
Engine::cbrTick (int f)
{
  auto &fl = m_flows[f];
  const int stationNode = fl.spec.station + 1;
  if (fl.spec.direction == Direction::Up)
    enqueue (fl.stationQueue, makeData (fl, stationNode, 0, fl.nextCbr));
  else
    {
      auto frame = makeData (fl, 0, stationNode, fl.nextCbr);
      schedule (m_now + fl.spec.wiredDelay, [this, f, frame] { apArrival (f, frame); });
    }
  ++fl.nextCbr;
  const double next = fl.spec.start + fl.nextCbr / fl.spec.ratePps;
  if (next <= m_cfg.horizon)
    schedule (next, [this, f] { cbrTick (f); });
}

void
Engine::tcpSend (int f, std::int64_t seq)
{
  auto &fl = m_flows[f];
  const int stationNode = fl.spec.station + 1;
  if (fl.spec.direction == Direction::Up)
    enqueue (fl.stationQueue, makeData (fl, stationNode, 0, seq));
  else
    {
      auto frame = makeData (fl, 0, stationNode, seq);
      schedule (m_now + fl.spec.wiredDelay, [this, f, frame] { apArrival (f, frame); });
    }
}

void
Engine::tcpReceiverData (int f, std::int64_t seq)
{
  auto &fl = m_flows[f];
  const auto before = fl.rx.cumulative ();
  const auto ack = fl.rx.onData (seq);
  if (ack > before)
    {
      fl.stats.payloadBytes += static_cast<double> (ack - before) * fl.spec.packetBytes;
      fl.stats.packets += ack - before;
    }
  const int stationNode = fl.spec.station + 1;
  FrameRecord a;
  a.flowId = f;
  a.payloadBytes = m_cfg.tcp.ackBytes;
  a.enqueueTime = m_now;
  a.kind = FrameKind::TransportAck;
  a.seq = ack;
  if (fl.spec.direction == Direction::Up)
    {
      // wired receiver; the ACK crosses the wired link then the AP queue
      a.source = 0;
      a.destination = stationNode;
      schedule (m_now + fl.spec.wiredDelay, [this, f, a] { apArrival (f, a); });
    }
  else
    {
      a.source = stationNode;
      a.destination = 0;
      enqueue (fl.stationQueue, a);
    }
}

void
Engine::tcpSenderAck (int f, std::int64_t ack)
{
  auto &fl = m_flows[f];
  if (fl.tcp.finished ())
    return;
  // every segment and ACK crosses the AP; count them against the phase the
  // sender was in when the ACK arrived
  const bool slowStart = fl.tcp.phase () == TcpPhase::SlowStart;
  auto res = tcpOnAck (fl.tcp, ack);
  if (slowStart)
    {
      fl.stats.slowStartBackward += 1;
      fl.stats.slowStartForward += static_cast<std::int64_t> (res.release.size ());
    }
  if (!res.advanced)
    return;
  for (auto seq : res.release)
    tcpSend (f, seq);
  if (fl.tcp.finished ())
    {
      fl.stats.completionTime = m_now - fl.spec.start;
      ++fl.timerEpoch;
      return;
    }
  armTimer (f);
}

void
Engine::armTimer (int f)
{
  auto &fl = m_flows[f];
  const auto epoch = ++fl.timerEpoch;
  schedule (m_now + fl.tcp.rto, [this, f, epoch] {
    auto &c = m_flows[f];
    if (c.timerEpoch != epoch || c.tcp.finished ())
      return;
    auto seq = tcpOnTimeout (c.tcp);
    if (!seq)
      return;
    c.stats.timeouts = c.tcp.timeouts;
    tcpSend (f, *seq);
    armTimer (f);
  });
}

void
Engine::onBeacon ()
{
  BeaconObservation obs;
  obs.time = m_now;
  obs.perAc = std::move (m_obs);
  const int base = static_cast<int> (m_cfg.stations.size ());
  for (std::size_t a = 0; a < obs.perAc.size (); ++a)
    obs.perAc[a].apQueueLength = m_queues[base + a].be.queue ().size ();
  m_obs.assign (m_cfg.apAcs.size (), {});

  if (m_hook)
    {
      auto out = m_hook->onBeacon (obs);
      bool changed = false;
      for (const auto &u : out.updates)
        {
          auto &q = m_queues[base + u.ac];
          if (q.be.mode () == BackoffMode::Standard && u.params.cwMin != std::floor (u.params.cwMin))
            {
              auto p = u.params;
              p.cwMin = std::max (1.0, std::round (p.cwMin));
              q.be.setParams (p);
            }
          else
            q.be.setParams (u.params);
          changed = true;
          SPDLOG_DEBUG ("t={:.3f} AC{} AP CW_min={:.3f} N_TXOP={}", m_now, u.ac, u.params.cwMin, u.params.nTxop);
        }
      if (changed)
        recomputeOffsets ();
      m_trace.beacons.insert (m_trace.beacons.end (), out.beacon.begin (), out.beacon.end ());
      m_trace.intervals.insert (m_trace.intervals.end (), out.intervals.begin (), out.intervals.end ());
      m_trace.annotations.insert (m_trace.annotations.end (), out.annotations.begin (), out.annotations.end ());
    }
  const double next = m_now + m_cfg.beaconInterval;
  if (next <= m_cfg.horizon)
    schedule (next, [this] { onBeacon (); });
}

SimTrace
Engine::run ()
{
  recomputeOffsets ();
  for (auto &q : m_queues)
    {
      q.be.drawCounter (m_rng);
      q.stats = &m_trace.perTc[q.tc];
    }
  for (std::size_t f = 0; f < m_flows.size (); ++f)
    if (m_flows[f].spec.start <= m_cfg.horizon)
      schedule (m_flows[f].spec.start, [this, f] { startFlow (static_cast<int> (f)); });
  if (!m_cfg.apAcs.empty ())
    schedule (m_cfg.beaconInterval, [this] { onBeacon (); });

  m_slot = 1;
  m_slotStart = m_cfg.phy.aifs (m_aifsnMin);
  const std::int64_t slotLimit = m_cfg.maxSlots.value_or (std::numeric_limits<std::int64_t>::max ());
  const double slotTime = m_cfg.phy.slotTime;

  while (m_slotStart < m_cfg.horizon && m_trace.totalSlots () < slotLimit)
    {
      processEventsUpTo (m_slotStart);
      m_now = m_slotStart;

      int best = std::numeric_limits<int>::max ();
      for (const auto &q : m_queues)
        if (!q.be.queue ().empty ())
          best = std::min (best, txSlot (q));

      const double tEvent = std::min (nextEventTime (), m_cfg.horizon);
      const std::int64_t slotsLeft = slotLimit - m_trace.totalSlots ();
      const double txStart = best == std::numeric_limits<int>::max ()
                                 ? kInf
                                 : m_slotStart + (best - m_slot) * slotTime;

      if (tEvent < txStart)
        {
          // jump to the first slot boundary at or after the next event
          if (!std::isfinite (tEvent))
            break;
          auto steps = static_cast<std::int64_t> (std::ceil ((tEvent - m_slotStart) / slotTime - 1e-12));
          steps = std::clamp<std::int64_t> (steps, 1, slotsLeft);
          advanceIdle (m_slot + static_cast<int> (steps));
          continue;
        }
      if (best - m_slot >= slotsLeft)
        {
          advanceIdle (m_slot + static_cast<int> (slotsLeft));
          break;
        }
      advanceIdle (best);
      m_now = m_slotStart;
      resolveSlot (best);
    }

  // a slot-limited run ends where the last slot ends, not at the horizon
  const double end = m_trace.totalSlots () >= slotLimit ? std::min (m_cfg.horizon, m_slotStart) : m_cfg.horizon;
  processEventsUpTo (end);
  m_trace.endTime = std::min (end, std::max (m_now, m_slotStart));

  for (auto &fl : m_flows)
    {
      fl.stats.timeouts = fl.tcp.timeouts;
      m_trace.flows.push_back (fl.stats);
    }
  for (const auto &q : m_queues)
    for (const auto &f : q.be.queue ())
      m_trace.flows[f.flowId].residual += 1;
  for (const auto &q : m_queues)
    m_trace.entities.push_back ({q.node, q.ac, q.tc, q.be.drawnWindowSum (), q.be.configuredWindowSum (), q.be.draws ()});
  return std::move (m_trace);
}

} // namespace

SimTrace
runSimulation (const SimConfig &cfg, const TrafficBinding &traffic, AdaptationHook *controller)
{
  cfg.validate ();
  Engine engine (cfg, traffic, controller);
  return engine.run ();
}

} // namespace edca
