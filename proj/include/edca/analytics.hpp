#ifndef EDCA_ANALYTICS_HPP
#define EDCA_ANALYTICS_HPP

#include "edca/params.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace edca {

/// Saturation fixed-point model of EDCA contention with AIFS contention zones,
/// and the AP parameter search built on top of it.
///
/// Traffic classes are indexed by position in the list passed in. When a
/// utilization ratio is formed, index 0 is the uplink class (stations) and
/// index 1 the downlink class (the AP).
namespace analytics {

class ConvergenceError : public std::runtime_error
{
public:
  ConvergenceError (const std::string &what, double residual)
    : std::runtime_error (what), m_residual (residual) {}
  double residual () const { return m_residual; }

private:
  double m_residual;
};

/// The search in computeApParameters ran out of room under the caps.
class InfeasiblePlan : public std::runtime_error
{
public:
  InfeasiblePlan (const std::string &what, double lastCw, int lastTxop)
    : std::runtime_error (what), m_lastCw (lastCw), m_lastTxop (lastTxop) {}
  double lastCw () const { return m_lastCw; }
  int lastTxop () const { return m_lastTxop; }

private:
  double m_lastCw;
  int m_lastTxop;
};

using Tcs = std::span<const TrafficClassParams>;

/// d_i = AIFSN_i - min AIFSN.
std::vector<int> zoneOffsets (Tcs tcs);

/// Contention zone governing backoff slot n (1-based): the class with the
/// largest d among those with d <= n - 1, highest index on ties.
int zoneIndex (int slot, Tcs tcs);

/// Probability that class i collides when transmitting in zone x.
double zoneCollisionProb (std::size_t i, std::size_t x, std::span<const double> tau, Tcs tcs);

/// Probability that at least one transmission happens in a slot of zone x.
double zoneTransmissionProb (std::size_t x, std::span<const double> tau, Tcs tcs);

/// W_min: the minimum over classes of CW_max (rounded up for fractional windows).
int minMaxWindow (Tcs tcs);

/// Steady-state occupancy b'_1..b'_{W_min} of the backoff-slot chain
/// (element 0 is slot 1). Throws std::domain_error when every tau is zero.
std::vector<double> slotOccupancy (std::span<const double> tau, Tcs tcs);

/// Occupancy-weighted collision probability of class i. zoneCollision[x]
/// holds p_{c_{i,x}} for every zone x reachable by i.
double avgCollisionProb (std::size_t i, std::span<const double> bPrime,
                         std::span<const double> zoneCollision, Tcs tcs);

/// Mean number of backoff slots per transmission attempt. The first attempt
/// uses window cwMin.
double expectedBackoffSlots (const TrafficClassParams &tc, double pc);

inline double
tauFromBackoff (double eTbo)
{
  return 1.0 / (eTbo + 1.0);
}

struct SolverOptions
{
  double tolerance = 1e-10;
  int maxIterations = 10000;
  double damping = 0.5;
};

struct FixedPointSolution
{
  std::vector<double> tau;
  std::vector<double> pc;
  std::vector<double> eTbo;
  std::vector<double> bPrime;
  std::vector<double> gamma;
  /// Downlink/uplink utilization ratio; present with two or more classes.
  std::optional<double> utilization;
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
};

/// Per-class collision probabilities for a given tau vector.
std::vector<double> collisionProbs (std::span<const double> tau, Tcs tcs);

FixedPointSolution solveFixedPoint (Tcs tcs, const SolverOptions &opts = {});

/// Share gamma_i of successful transmissions carried by class i (aggregate
/// over the class's N_i members).
std::vector<double> successShare (std::span<const double> tau, Tcs tcs, std::span<const double> bPrime);

/// U = gamma_1 N_TXOP,1 / (gamma_0 N_TXOP,0).
double utilizationRatio (std::span<const double> gamma, Tcs tcs);

/// Closed form of the utilization ratio valid when AIFSN_0 == AIFSN_1.
double utilizationRatioEqualAifs (std::span<const double> tau, Tcs tcs);

/// Inverse of expectedBackoffSlots/tauFromBackoff in cwMin. The result may
/// be fractional. Throws InfeasiblePlan when it exceeds cwCap.
double cwMinFromTau (double tau, double pc, int m, int r, double cwCap = 32767.0);

struct ApParameterPlan
{
  int aifsn = 2;
  double cwMin = 0.0;
  int nTxop = 1;
  int roundedCwMin = 0;
  double predictedUtilization = 0.0;
  /// tau of the station class and of the AP class at the solved point.
  double tauStation = 0.0;
  double tauAp = 0.0;
};

struct ApSearchOptions
{
  SolverOptions solver;
  int initialTxop = 1;
  int maxTxop = 64;
  double cwCap = 32767.0;
  /// Backoff stages and retry limit for the AP class; defaults to the station's.
  std::optional<int> apStages;
  std::optional<int> apRetryLimit;
};

/// Finds the AP-side AIFSN, CW_min and N_TXOP that give a downlink/uplink
/// utilization ratio of `requiredRatio` against `nUplink` saturated stations
/// using `station` parameters. `higherPriorityCw` lists the CW_min of every
/// higher-priority access category (station or AP side); the AP CW_min is
/// kept at or above all of them by doubling N_TXOP.
ApParameterPlan computeApParameters (const TrafficClassParams &station, int nUplink, double requiredRatio,
                                     std::span<const double> higherPriorityCw = {},
                                     const ApSearchOptions &opts = {});

} // namespace analytics
} // namespace edca

#endif
