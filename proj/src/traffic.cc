#include "edca/traffic.hpp"

#include "edca/params.hpp"

#include <algorithm>
#include <cmath>

namespace edca {

std::string
toString (Direction d)
{
  return d == Direction::Up ? "up" : "down";
}

std::string
toString (Transport t)
{
  return t == Transport::Udp ? "udp" : "tcp";
}

void
FlowSpec::validate () const
{
  if (start < 0.0 || wiredDelay < 0.0)
    throw ConfigError ("flow " + std::to_string (id) + ": negative start time or wired delay");
  if (packetBytes <= 0)
    throw ConfigError ("flow " + std::to_string (id) + ": packet size must be positive");
  if (transport == Transport::Udp && !saturated && !(ratePps > 0.0))
    throw ConfigError ("flow " + std::to_string (id) + ": UDP flow needs a positive rate or saturation");
  if (transport == Transport::Tcp && saturated)
    throw ConfigError ("flow " + std::to_string (id) + ": TCP flows cannot be saturated sources");
  if (totalPackets < 0)
    throw ConfigError ("flow " + std::to_string (id) + ": negative packet count");
}

std::vector<double>
cbrArrivals (double ratePps, double start, double end)
{
  std::vector<double> out;
  if (!(ratePps > 0.0))
    return out;
  for (std::int64_t k = 0;; ++k)
    {
      const double t = start + k / ratePps;
      if (t >= end)
        break;
      out.push_back (t);
    }
  return out;
}

void
TcpConfig::validate () const
{
  if (maxWindow < 1)
    throw ConfigError ("TcpConfig: maxWindow must be >= 1");
  if (rtoBase <= 0.0 || rtoCap < rtoBase)
    throw ConfigError ("TcpConfig: need 0 < rtoBase <= rtoCap");
  if (ackBytes <= 0)
    throw ConfigError ("TcpConfig: ackBytes must be positive");
}

TcpConnState
TcpConnState::make (const TcpConfig &cfg, std::int64_t totalPackets)
{
  TcpConnState c;
  c.maxWindow = cfg.maxWindow;
  c.ssthresh = cfg.initialSsthresh > 0.0 ? cfg.initialSsthresh : cfg.maxWindow;
  c.totalPackets = totalPackets;
  c.rto = cfg.rtoBase;
  c.rtoBase = cfg.rtoBase;
  c.rtoCap = cfg.rtoCap;
  return c;
}

namespace {

std::vector<std::int64_t>
release (TcpConnState &c)
{
  std::vector<std::int64_t> out;
  const auto window = std::min<std::int64_t> (static_cast<std::int64_t> (std::floor (c.cwnd + 1e-9)), c.maxWindow);
  while (c.inFlight () < window && (c.totalPackets == 0 || c.nextSeq <= c.totalPackets))
    out.push_back (c.nextSeq++);
  return out;
}

} // namespace

std::vector<std::int64_t>
tcpStart (TcpConnState &conn)
{
  return release (conn);
}

TcpAckResult
tcpOnAck (TcpConnState &conn, std::int64_t ack)
{
  TcpAckResult r;
  if (ack <= conn.highestAck)
    {
      ++conn.duplicateAcks;
      return r;
    }
  r.advanced = true;
  conn.highestAck = ack;
  // the receiver may have buffered segments beyond a go-back-N restart point
  conn.nextSeq = std::max (conn.nextSeq, ack + 1);
  if (conn.phase () == TcpPhase::SlowStart)
    conn.cwnd += 1.0;
  else
    conn.cwnd += 1.0 / conn.cwnd;
  conn.cwnd = std::min (conn.cwnd, static_cast<double> (conn.maxWindow));
  conn.rto = conn.rtoBase;
  r.release = release (conn);
  return r;
}

std::optional<std::int64_t>
tcpOnTimeout (TcpConnState &conn)
{
  if (conn.inFlight () <= 0)
    return std::nullopt;
  ++conn.timeouts;
  conn.ssthresh = std::max (conn.cwnd / 2.0, 2.0);
  conn.cwnd = 1.0;
  conn.nextSeq = conn.highestAck + 1;
  conn.rto = std::min (conn.rto * 2.0, conn.rtoCap);
  return conn.nextSeq++;
}

std::int64_t
TcpReceiver::onData (std::int64_t seq)
{
  if (seq == m_cumulative + 1)
    {
      ++m_cumulative;
      while (!m_ahead.empty () && *m_ahead.begin () <= m_cumulative + 1)
        {
          if (*m_ahead.begin () == m_cumulative + 1)
            ++m_cumulative;
          m_ahead.erase (m_ahead.begin ());
        }
    }
  else if (seq > m_cumulative + 1)
    m_ahead.insert (seq);
  return m_cumulative;
}

} // namespace edca
