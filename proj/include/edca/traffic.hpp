#ifndef EDCA_TRAFFIC_HPP
#define EDCA_TRAFFIC_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace edca {

enum class Direction
{
  Up,
  Down
};

enum class Transport
{
  Udp,
  Tcp
};

std::string toString (Direction d);
std::string toString (Transport t);

/**
 * One end-to-end flow between a wireless station and a wired host behind
 * the AP. Uplink flows originate at `station`; downlink flows reach the AP
 * from the wired side after `wiredDelay` and are queued in AP access
 * category `ac`.
 */
struct FlowSpec
{
  int id = 0;
  Direction direction = Direction::Up;
  Transport transport = Transport::Udp;
  int station = 0;
  int ac = 0;
  double start = 0.0;
  double wiredDelay = 0.0;  // one way, seconds

  // UDP
  double ratePps = 0.0;
  bool saturated = false;
  int packetBytes = 1500;
  /// When > packetBytes, payload sizes are drawn uniformly in
  /// [packetBytes, maxPacketBytes] (variable-rate video).
  int maxPacketBytes = 0;

  // TCP; 0 means a bulk transfer that never ends
  std::int64_t totalPackets = 0;

  void validate () const;
};

using TrafficBinding = std::vector<FlowSpec>;

/// Arrival instants of a constant-rate source in [start, end): start + k / rate.
std::vector<double> cbrArrivals (double ratePps, double start, double end);

struct TcpConfig
{
  int maxWindow = 20;               // packets (receiver window)
  double initialSsthresh = 0.0;     // 0: equal to maxWindow
  double rtoBase = 1.0;             // s
  double rtoCap = 8.0;              // s
  int ackBytes = 40;

  void validate () const;
};

enum class TcpPhase
{
  SlowStart,
  CongestionAvoidance
};

/**
 * Sender side of a window-based TCP without fast retransmit: slow start,
 * additive increase, cumulative ACKs, go-back-N on retransmission timeout.
 * Segments are numbered from 1.
 */
struct TcpConnState
{
  double cwnd = 1.0;
  double ssthresh = 20.0;
  int maxWindow = 20;
  std::int64_t highestAck = 0;   // last cumulatively acknowledged segment
  std::int64_t nextSeq = 1;      // next segment to put on the wire
  std::int64_t totalPackets = 0; // 0: unbounded
  double rto = 1.0;
  double rtoBase = 1.0;
  double rtoCap = 8.0;
  std::int64_t duplicateAcks = 0;
  std::int64_t timeouts = 0;

  static TcpConnState make (const TcpConfig &cfg, std::int64_t totalPackets);

  TcpPhase phase () const { return cwnd < ssthresh ? TcpPhase::SlowStart : TcpPhase::CongestionAvoidance; }
  std::int64_t inFlight () const { return nextSeq - 1 - highestAck; }
  bool finished () const { return totalPackets > 0 && highestAck >= totalPackets; }
};

/// Segments released by the initial window.
std::vector<std::int64_t> tcpStart (TcpConnState &conn);

struct TcpAckResult
{
  std::vector<std::int64_t> release;
  bool advanced = false;
};

/// Process cumulative ACK `ack`; stale or duplicate ACKs only bump a counter.
TcpAckResult tcpOnAck (TcpConnState &conn, std::int64_t ack);

/// Retransmission timeout. Returns the segment to resend, or nothing when
/// all data was already acknowledged.
std::optional<std::int64_t> tcpOnTimeout (TcpConnState &conn);

/// Receiver with an out-of-order buffer; one cumulative ACK per data segment.
class TcpReceiver
{
public:
  /// Returns the cumulative ACK value to send back.
  std::int64_t onData (std::int64_t seq);
  std::int64_t cumulative () const { return m_cumulative; }

private:
  std::int64_t m_cumulative = 0;
  std::set<std::int64_t> m_ahead;
};

} // namespace edca

#endif
