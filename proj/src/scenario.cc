#include "edca/scenario.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace edca {

using nlohmann::json;

void
ScenarioSpec::validate () const
{
  if (acs.empty ())
    throw ConfigError ("scenario: no access categories");
  for (const auto &a : acs)
    {
      a.station.validate ();
      a.apParams ().validate ();
    }
  if (!(horizon > 0.0))
    throw ConfigError ("scenario: horizon must be positive");
  if (seeds.empty ())
    throw ConfigError ("scenario: no seeds");
  if (bufferPackets < 0)
    throw ConfigError ("scenario: negative buffer size");
  adaptation.validate ();
  tcp.validate ();
  for (std::size_t i = 0; i < flows.size (); ++i)
    {
      const auto &f = flows[i];
      const auto tag = "scenario flow " + std::to_string (i);
      if (f.ac < 0 || f.ac >= static_cast<int> (acs.size ()))
        throw ConfigError (tag + ": unknown access category");
      if (f.start < 0.0 || f.start > horizon)
        throw ConfigError (tag + ": start time outside the horizon");
      if (f.transport == Transport::Udp && !f.saturated && !(f.rateBps > 0.0))
        throw ConfigError (tag + ": UDP flow needs rate_bps or saturated");
    }
}

namespace {

TrafficClassParams
parseEdca (const json &j, const TrafficClassParams &base)
{
  TrafficClassParams p = base;
  p.aifsn = j.value ("aifsn", p.aifsn);
  p.cwMin = j.value ("cw_min", p.cwMin);
  if (j.contains ("cw_max"))
    p.m = stagesFor (p.cwMin, j.at ("cw_max").get<double> ());
  else if (j.contains ("stages"))
    p.m = j.at ("stages").get<int> ();
  p.retryLimit = j.value ("retry_limit", p.retryLimit);
  p.nTxop = j.value ("txop_packets", p.nTxop);
  return p;
}

AcKind
parseKind (const std::string &s)
{
  if (s == "udp")
    return AcKind::Udp;
  if (s == "tcp")
    return AcKind::Tcp;
  if (s == "realtime")
    return AcKind::Realtime;
  throw ConfigError ("scenario: unknown access category kind '" + s + "'");
}

int
resolveAc (const json &ref, const std::vector<AcSpec> &acs)
{
  if (ref.is_number_integer ())
    return ref.get<int> ();
  const auto name = ref.get<std::string> ();
  for (std::size_t i = 0; i < acs.size (); ++i)
    if (acs[i].name == name)
      return static_cast<int> (i);
  throw ConfigError ("scenario: unknown access category '" + name + "'");
}

} // namespace

ScenarioSpec
parseScenario (const std::string &jsonText, double scale)
{
  if (!(scale > 0.0))
    throw ConfigError ("scenario: scale must be positive");
  json j;
  try
    {
      j = json::parse (jsonText);
    }
  catch (const json::parse_error &e)
    {
      throw ConfigError (std::string ("scenario: ") + e.what ());
    }

  ScenarioSpec s;
  try
    {
      s.name = j.value ("name", s.name);
      s.horizon = j.value ("horizon_s", s.horizon);
      s.bufferPackets = j.value ("buffer_packets", s.bufferPackets);
      if (j.contains ("seeds"))
        {
          const auto &sd = j.at ("seeds");
          s.seeds.clear ();
          if (sd.is_array ())
            s.seeds = sd.get<std::vector<std::uint64_t>> ();
          else
            for (std::uint64_t k = 1; k <= sd.get<std::uint64_t> (); ++k)
              s.seeds.push_back (k);
        }
      const auto backoff = j.value ("ap_backoff", std::string ("fractional"));
      if (backoff == "fractional")
        s.apBackoff = BackoffMode::Fractional;
      else if (backoff == "rounded")
        s.apBackoff = BackoffMode::Standard;
      else
        throw ConfigError ("scenario: ap_backoff must be 'fractional' or 'rounded'");

      for (const auto &a : j.at ("access_categories"))
        {
          AcSpec ac;
          ac.name = a.value ("name", "ac" + std::to_string (s.acs.size ()));
          ac.kind = parseKind (a.value ("kind", std::string ("udp")));
          ac.station = parseEdca (a, TrafficClassParams{});
          if (a.contains ("ap"))
            ac.ap = parseEdca (a.at ("ap"), ac.station);
          s.acs.push_back (std::move (ac));
        }

      for (const auto &f : j.value ("flows", json::array ()))
        {
          FlowRow row;
          const auto dir = f.value ("direction", std::string ("up"));
          if (dir != "up" && dir != "down")
            throw ConfigError ("scenario: direction must be 'up' or 'down'");
          row.direction = dir == "up" ? Direction::Up : Direction::Down;
          const auto tr = f.value ("transport", std::string ("udp"));
          if (tr != "udp" && tr != "tcp")
            throw ConfigError ("scenario: transport must be 'udp' or 'tcp'");
          row.transport = tr == "udp" ? Transport::Udp : Transport::Tcp;
          row.ac = resolveAc (f.at ("ac"), s.acs);
          row.rateBps = f.value ("rate_bps", 0.0);
          row.saturated = f.value ("saturated", false);
          row.packetBytes = f.value ("packet_bytes", 1500);
          row.maxPacketBytes = f.value ("max_packet_bytes", 0);
          row.packets = f.value ("packets", std::int64_t{0});
          int count = f.value ("count", 1);
          const double start = f.value ("start_s", 0.0);
          const double startStep = f.value ("start_step_s", 0.0);
          const double delay = f.value ("wired_delay_ms", 0.0) / 1e3;
          const double delayStep = f.value ("wired_delay_step_ms", 0.0) / 1e3;
          if (count < 0)
            throw ConfigError ("scenario: negative flow count");
          if (count > 0)
            count = std::max (1, static_cast<int> (std::lround (count * scale)));
          for (int k = 0; k < count; ++k)
            {
              row.start = start + k * startStep;
              row.wiredDelay = delay + k * delayStep;
              s.flows.push_back (row);
            }
        }

      if (j.contains ("adaptation"))
        {
          const auto &a = j.at ("adaptation");
          s.adaptation.beta = a.value ("beta", s.adaptation.beta);
          s.adaptation.alpha = a.value ("alpha", s.adaptation.alpha);
          s.adaptation.th = a.value ("th", s.adaptation.th);
          s.adaptation.beaconInterval = a.value ("beacon_interval_s", s.adaptation.beaconInterval);
        }
      if (j.contains ("tcp"))
        {
          const auto &t = j.at ("tcp");
          s.tcp.maxWindow = t.value ("max_window", s.tcp.maxWindow);
          s.tcp.rtoBase = t.value ("rto_base_s", s.tcp.rtoBase);
          s.tcp.rtoCap = t.value ("rto_cap_s", s.tcp.rtoCap);
          s.tcp.ackBytes = t.value ("ack_bytes", s.tcp.ackBytes);
        }
    }
  catch (const json::exception &e)
    {
      throw ConfigError (std::string ("scenario: ") + e.what ());
    }
  s.validate ();
  return s;
}

ScenarioSpec
loadScenario (const std::string &path, double scale)
{
  std::ifstream in (path);
  if (!in)
    throw ConfigError ("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf ();
  return parseScenario (buf.str (), scale);
}

namespace {

json
edcaJson (const TrafficClassParams &p)
{
  return {{"aifsn", p.aifsn}, {"cw_min", p.cwMin}, {"cw_max", p.cwMax ()}, {"retry_limit", p.retryLimit},
          {"txop_packets", p.nTxop}};
}

} // namespace

std::string
scenarioToJson (const ScenarioSpec &spec)
{
  json j;
  j["name"] = spec.name;
  j["horizon_s"] = spec.horizon;
  j["seeds"] = spec.seeds;
  j["buffer_packets"] = spec.bufferPackets;
  j["ap_backoff"] = spec.apBackoff == BackoffMode::Fractional ? "fractional" : "rounded";
  json acs = json::array ();
  for (const auto &a : spec.acs)
    {
      json ac = edcaJson (a.station);
      ac["name"] = a.name;
      ac["kind"] = a.kind == AcKind::Udp ? "udp" : a.kind == AcKind::Tcp ? "tcp" : "realtime";
      if (a.ap)
        ac["ap"] = edcaJson (*a.ap);
      acs.push_back (ac);
    }
  j["access_categories"] = acs;
  json flows = json::array ();
  for (const auto &f : spec.flows)
    {
      json row = {{"direction", toString (f.direction)},
                  {"transport", toString (f.transport)},
                  {"ac", spec.acs[f.ac].name},
                  {"start_s", f.start},
                  {"wired_delay_ms", f.wiredDelay * 1e3},
                  {"packet_bytes", f.packetBytes}};
      if (f.transport == Transport::Udp)
        {
          if (f.saturated)
            row["saturated"] = true;
          else
            row["rate_bps"] = f.rateBps;
          if (f.maxPacketBytes > f.packetBytes)
            row["max_packet_bytes"] = f.maxPacketBytes;
        }
      else if (f.packets > 0)
        row["packets"] = f.packets;
      flows.push_back (row);
    }
  j["flows"] = flows;
  j["adaptation"] = {{"beta", spec.adaptation.beta},
                     {"alpha", spec.adaptation.alpha},
                     {"th", spec.adaptation.th},
                     {"beacon_interval_s", spec.adaptation.beaconInterval}};
  j["tcp"] = {{"max_window", spec.tcp.maxWindow},
              {"rto_base_s", spec.tcp.rtoBase},
              {"rto_cap_s", spec.tcp.rtoCap},
              {"ack_bytes", spec.tcp.ackBytes}};
  return j.dump (2);
}

RunMode
parseRunMode (const std::string &s)
{
  if (s == "off")
    return RunMode::Off;
  if (s == "analytic")
    return RunMode::Analytic;
  if (s == "adaptive")
    return RunMode::Adaptive;
  throw ConfigError ("unknown mode '" + s + "' (off|analytic|adaptive)");
}

std::string
toString (RunMode m)
{
  switch (m)
    {
    case RunMode::Off:
      return "off";
    case RunMode::Analytic:
      return "analytic";
    default:
      return "adaptive";
    }
}

SimConfig
buildSimConfig (const ScenarioSpec &spec, std::uint64_t seed)
{
  SimConfig cfg;
  cfg.phy = spec.phy;
  cfg.horizon = spec.horizon;
  cfg.seed = seed;
  cfg.bufferPackets = spec.bufferPackets;
  cfg.beaconInterval = spec.adaptation.beaconInterval;
  cfg.tcp = spec.tcp;
  for (std::size_t a = 0; a < spec.acs.size (); ++a)
    {
      const auto mode = spec.acs[a].kind == AcKind::Realtime ? BackoffMode::Standard : spec.apBackoff;
      cfg.apAcs.push_back ({spec.acs[a].apParams (), static_cast<int> (spec.acs.size () + a), mode});
    }
  for (const auto &f : spec.flows)
    cfg.stations.push_back ({spec.acs[f.ac].station, f.ac});
  if (cfg.stations.empty ())
    cfg.stations.push_back ({spec.acs.front ().station, 0});
  return cfg;
}

TrafficBinding
buildTraffic (const ScenarioSpec &spec)
{
  TrafficBinding out;
  for (std::size_t i = 0; i < spec.flows.size (); ++i)
    {
      const auto &r = spec.flows[i];
      FlowSpec f;
      f.id = static_cast<int> (i);
      f.direction = r.direction;
      f.transport = r.transport;
      f.station = static_cast<int> (i);
      f.ac = r.ac;
      f.start = r.start;
      f.wiredDelay = r.wiredDelay;
      f.saturated = r.saturated;
      f.packetBytes = r.packetBytes;
      f.maxPacketBytes = r.maxPacketBytes;
      f.totalPackets = r.packets;
      if (r.transport == Transport::Udp && r.rateBps > 0.0)
        {
          const double meanBytes = r.maxPacketBytes > r.packetBytes ? 0.5 * (r.packetBytes + r.maxPacketBytes)
                                                                    : r.packetBytes;
          f.ratePps = r.rateBps / (8.0 * meanBytes);
        }
      out.push_back (f);
    }
  return out;
}

} // namespace edca
