#include "edca/metrics.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace edca {

double
jainFairnessIndex (std::span<const double> x)
{
  if (x.empty ())
    throw std::invalid_argument ("jainFairnessIndex: empty vector");
  double sum = 0.0;
  double sq = 0.0;
  for (double v : x)
    {
      if (v < 0.0)
        throw std::invalid_argument ("jainFairnessIndex: negative throughput");
      sum += v;
      sq += v * v;
    }
  if (sq == 0.0)
    throw std::invalid_argument ("jainFairnessIndex: all throughputs are zero");
  return sum * sum / (static_cast<double> (x.size ()) * sq);
}

const GroupMetrics *
MetricsReport::group (Direction d, Transport t) const
{
  for (const auto &g : groups)
    if (g.direction == d && g.transport == t)
      return &g;
  return nullptr;
}

double
MetricsReport::total (Direction d, Transport t) const
{
  const auto *g = group (d, t);
  return g ? g->totalBps : 0.0;
}

double
MetricsReport::ratio (Transport t) const
{
  const double up = total (Direction::Up, t);
  if (up <= 0.0)
    return std::numeric_limits<double>::quiet_NaN ();
  return total (Direction::Down, t) / up;
}

MetricsReport
buildReport (const ScenarioSpec &spec, RunMode mode, const std::vector<std::uint64_t> &seeds,
             const std::vector<SimTrace> &traces)
{
  MetricsReport r;
  r.scenario = spec.name;
  r.mode = mode;
  r.horizon = spec.horizon;
  const auto nSeeds = static_cast<double> (traces.size ());
  const auto nFlows = spec.flows.size ();

  for (std::size_t s = 0; s < traces.size (); ++s)
    {
      SeedReport sr;
      sr.seed = seeds[s];
      for (const auto &f : traces[s].flows)
        sr.throughputBps.push_back (f.payloadBytes * 8.0 / spec.horizon);
      sr.intervals = traces[s].intervals;
      sr.annotations = traces[s].annotations;
      r.seeds.push_back (std::move (sr));
    }

  for (std::size_t i = 0; i < nFlows; ++i)
    {
      FlowMetrics fm;
      fm.id = static_cast<int> (i);
      fm.direction = spec.flows[i].direction;
      fm.transport = spec.flows[i].transport;
      fm.ac = spec.flows[i].ac;
      double sum = 0.0, sq = 0.0, delaySum = 0.0, compSum = 0.0;
      std::int64_t delayCount = 0;
      for (std::size_t s = 0; s < traces.size (); ++s)
        {
          const auto &f = traces[s].flows[i];
          const double x = r.seeds[s].throughputBps[i];
          sum += x;
          sq += x * x;
          delaySum += f.delaySum;
          delayCount += f.delayCount;
          if (f.completionTime)
            {
              compSum += *f.completionTime;
              ++fm.completedSeeds;
            }
          fm.timeouts += f.timeouts / nSeeds;
          fm.slowStartForward += f.slowStartForward / nSeeds;
          fm.slowStartBackward += f.slowStartBackward / nSeeds;
        }
      if (nSeeds > 0)
        {
          fm.throughputBps = sum / nSeeds;
          fm.throughputStdBps = std::sqrt (std::max (0.0, sq / nSeeds - fm.throughputBps * fm.throughputBps));
        }
      fm.meanDelay = delayCount > 0 ? delaySum / delayCount : std::numeric_limits<double>::quiet_NaN ();
      if (fm.completedSeeds > 0)
        fm.completion = compSum / fm.completedSeeds;
      r.flows.push_back (fm);
    }

  for (auto d : {Direction::Up, Direction::Down})
    for (auto t : {Transport::Udp, Transport::Tcp})
      {
        GroupMetrics g;
        g.direction = d;
        g.transport = t;
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < nFlows; ++i)
          if (spec.flows[i].direction == d && spec.flows[i].transport == t)
            members.push_back (i);
        g.flows = static_cast<int> (members.size ());
        if (members.empty ())
          continue;
        double jainSum = 0.0;
        for (const auto &sr : r.seeds)
          {
            std::vector<double> x;
            for (auto i : members)
              x.push_back (sr.throughputBps[i]);
            double tot = 0.0;
            for (double v : x)
              tot += v;
            g.totalBps += tot / nSeeds;
            jainSum += tot > 0.0 ? jainFairnessIndex (x) : 1.0;
          }
        g.jain = nSeeds > 0 ? jainSum / nSeeds : 1.0;
        r.groups.push_back (g);
      }
  return r;
}

namespace {

std::ofstream
openCsv (const std::string &path)
{
  std::ofstream out (path, std::ios::binary);
  if (!out)
    throw std::runtime_error ("cannot write " + path);
  out << std::setprecision (10);
  return out;
}

void
writeNumber (std::ostream &os, double v)
{
  if (std::isfinite (v))
    os << v;
}

} // namespace

void
writeFlowCsv (const MetricsReport &r, const std::string &path)
{
  auto out = openCsv (path);
  out << "flow_id,direction,transport,throughput_bps,mean_delay_s,completion_s\n";
  for (const auto &f : r.flows)
    {
      out << f.id << ',' << toString (f.direction) << ',' << toString (f.transport) << ',';
      writeNumber (out, f.throughputBps);
      out << ',';
      writeNumber (out, f.meanDelay);
      out << ',';
      if (f.completion)
        writeNumber (out, *f.completion);
      out << '\n';
    }
}

void
writeIntervalCsv (const MetricsReport &r, const std::string &path)
{
  auto out = openCsv (path);
  out << "t,measured_U,cw_min_ap,n_txop_effective,ac,seed\n";
  for (const auto &s : r.seeds)
    for (const auto &iv : s.intervals)
      {
        writeNumber (out, iv.time);
        out << ',';
        writeNumber (out, iv.measuredU);
        out << ',';
        writeNumber (out, iv.cwMinAp);
        out << ',' << iv.nTxopEffective << ',' << iv.ac << ',' << s.seed << '\n';
      }
}

std::string
intervalCsvPath (const std::string &path)
{
  std::filesystem::path p (path);
  auto name = p.stem ().string () + "_intervals" + (p.has_extension () ? p.extension ().string () : ".csv");
  return (p.parent_path () / name).string ();
}

std::string
formatSummary (const MetricsReport &r)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision (3);
  os << r.scenario << " mode=" << toString (r.mode) << " horizon=" << r.horizon << "s seeds=" << r.seeds.size ()
     << "\n";
  for (const auto &g : r.groups)
    os << "  " << toString (g.direction) << '/' << toString (g.transport) << ": flows=" << g.flows
       << " total=" << g.totalBps / 1e6 << " Mbps jain=" << g.jain << "\n";
  for (auto t : {Transport::Udp, Transport::Tcp})
    {
      const double q = r.ratio (t);
      if (std::isfinite (q))
        os << "  down/up " << toString (t) << " ratio=" << q << "\n";
    }
  int completed = 0;
  double comp = 0.0;
  for (const auto &f : r.flows)
    if (f.completion)
      {
        ++completed;
        comp += *f.completion;
      }
  if (completed > 0)
    os << "  finite transfers completed: " << completed << ", mean completion " << comp / completed << " s\n";
  for (const auto &s : r.seeds)
    for (const auto &a : s.annotations)
      os << "  seed " << s.seed << ": " << a << "\n";
  return os.str ();
}

} // namespace edca
