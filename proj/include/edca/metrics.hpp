#ifndef EDCA_METRICS_HPP
#define EDCA_METRICS_HPP

#include "edca/scenario.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace edca {

/// (sum x)^2 / (n sum x^2). Throws std::invalid_argument on an empty or all-zero vector.
double jainFairnessIndex (std::span<const double> x);

struct FlowMetrics
{
  int id = 0;
  Direction direction = Direction::Up;
  Transport transport = Transport::Udp;
  int ac = 0;
  double throughputBps = 0.0;       // mean over seeds
  double throughputStdBps = 0.0;    // spread over seeds
  double meanDelay = 0.0;           // MAC delay, s; NaN when nothing was delivered
  std::optional<double> completion; // mean over seeds that finished
  int completedSeeds = 0;
  double timeouts = 0.0;
  double slowStartForward = 0.0;
  double slowStartBackward = 0.0;
};

/// Flows of one direction and transport.
struct GroupMetrics
{
  Direction direction = Direction::Up;
  Transport transport = Transport::Udp;
  int flows = 0;
  double totalBps = 0.0;  // mean over seeds of the summed throughput
  double jain = 1.0;      // mean over seeds; 1 when the group carried nothing
};

struct SeedReport
{
  std::uint64_t seed = 0;
  std::vector<double> throughputBps;  // per flow
  std::vector<IntervalRecord> intervals;
  std::vector<std::string> annotations;
};

struct MetricsReport
{
  std::string scenario;
  RunMode mode = RunMode::Off;
  double horizon = 0.0;
  std::vector<FlowMetrics> flows;
  std::vector<GroupMetrics> groups;
  std::vector<SeedReport> seeds;

  const GroupMetrics *group (Direction d, Transport t) const;
  double total (Direction d, Transport t) const;
  /// Downlink over uplink total throughput; NaN without uplink traffic.
  double ratio (Transport t) const;
};

/// Folds per-seed traces, in seed order, into one report.
MetricsReport buildReport (const ScenarioSpec &spec, RunMode mode, const std::vector<std::uint64_t> &seeds,
                           const std::vector<SimTrace> &traces);

/// Per-flow CSV: flow_id,direction,transport,throughput_bps,mean_delay_s,completion_s
void writeFlowCsv (const MetricsReport &r, const std::string &path);
/// Per-interval CSV: t,measured_U,cw_min_ap,n_txop_effective,ac,seed
void writeIntervalCsv (const MetricsReport &r, const std::string &path);

/// "<stem>_intervals.csv" next to `path`.
std::string intervalCsvPath (const std::string &path);

/// Human-readable summary for the CLI.
std::string formatSummary (const MetricsReport &r);

} // namespace edca

#endif
