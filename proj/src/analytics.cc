#include "edca/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace edca {
namespace analytics {

std::vector<int>
zoneOffsets (Tcs tcs)
{
  if (tcs.empty ())
    return {};
  int aifsnMin = tcs[0].aifsn;
  for (const auto &tc : tcs)
    aifsnMin = std::min (aifsnMin, tc.aifsn);
  std::vector<int> d;
  d.reserve (tcs.size ());
  for (const auto &tc : tcs)
    d.push_back (tc.aifsn - aifsnMin);
  return d;
}

int
zoneIndex (int slot, Tcs tcs)
{
  if (slot < 1)
    throw std::domain_error ("zoneIndex: slot index must be >= 1");
  auto d = zoneOffsets (tcs);
  int best = -1;
  for (std::size_t z = 0; z < d.size (); ++z)
    {
      if (d[z] > slot - 1)
        continue;
      if (best < 0 || d[z] >= d[best])
        best = static_cast<int> (z);
    }
  return best;
}

namespace {

// prod over classes with d <= limit of (1 - tau)^N
double
idleProduct (int limit, std::span<const double> tau, Tcs tcs, const std::vector<int> &d)
{
  double prod = 1.0;
  for (std::size_t j = 0; j < tcs.size (); ++j)
    if (d[j] <= limit)
      prod *= std::pow (1.0 - tau[j], tcs[j].population);
  return prod;
}

void
checkTau (std::span<const double> tau, Tcs tcs)
{
  if (tau.size () != tcs.size ())
    throw std::invalid_argument ("tau and traffic class lists differ in length");
  for (double t : tau)
    if (!(t >= 0.0 && t <= 1.0))
      throw std::domain_error ("tau outside [0, 1]");
}

} // namespace

double
zoneCollisionProb (std::size_t i, std::size_t x, std::span<const double> tau, Tcs tcs)
{
  checkTau (tau, tcs);
  auto d = zoneOffsets (tcs);
  if (d[x] < d[i])
    throw std::domain_error ("zoneCollisionProb: zone precedes the class's AIFS");
  if (tau[i] >= 1.0)
    throw std::domain_error ("zoneCollisionProb: tau_i == 1");
  return 1.0 - idleProduct (d[x], tau, tcs, d) / (1.0 - tau[i]);
}

double
zoneTransmissionProb (std::size_t x, std::span<const double> tau, Tcs tcs)
{
  checkTau (tau, tcs);
  auto d = zoneOffsets (tcs);
  return 1.0 - idleProduct (d[x], tau, tcs, d);
}

int
minMaxWindow (Tcs tcs)
{
  double w = tcs[0].cwMax ();
  for (const auto &tc : tcs)
    w = std::min (w, tc.cwMax ());
  return std::max (1, static_cast<int> (std::ceil (w - 1e-9)));
}

std::vector<double>
slotOccupancy (std::span<const double> tau, Tcs tcs)
{
  checkTau (tau, tcs);
  if (std::all_of (tau.begin (), tau.end (), [] (double t) { return t == 0.0; }))
    throw std::domain_error ("slotOccupancy: degenerate chain (all tau are zero)");

  const int wMin = minMaxWindow (tcs);
  std::vector<double> ptr (tcs.size ());
  for (std::size_t x = 0; x < tcs.size (); ++x)
    ptr[x] = zoneTransmissionProb (x, tau, tcs);

  std::vector<double> b (wMin);
  b[0] = 1.0;
  for (int n = 2; n <= wMin; ++n)
    b[n - 1] = b[n - 2] * (1.0 - ptr[zoneIndex (n - 1, tcs)]);
  const double total = std::accumulate (b.begin (), b.end (), 0.0);
  for (auto &v : b)
    v /= total;
  return b;
}

double
avgCollisionProb (std::size_t i, std::span<const double> bPrime, std::span<const double> zoneCollision, Tcs tcs)
{
  auto d = zoneOffsets (tcs);
  const int wMin = static_cast<int> (bPrime.size ());
  if (d[i] >= wMin)
    throw std::domain_error ("avgCollisionProb: class never reaches a backoff slot before W_min");
  double num = 0.0, den = 0.0;
  for (int n = d[i] + 1; n <= wMin; ++n)
    {
      num += zoneCollision[zoneIndex (n, tcs)] * bPrime[n - 1];
      den += bPrime[n - 1];
    }
  return num / den;
}

double
expectedBackoffSlots (const TrafficClassParams &tc, double pc)
{
  if (!(pc >= 0.0 && pc < 1.0))
    throw std::domain_error ("expectedBackoffSlots: collision probability must lie in [0, 1)");
  const int r = tc.retryLimit;
  double sum = 0.0;
  double pk = 1.0;  // pc^(k-1)
  for (int k = 1; k <= r; ++k)
    {
      sum += pk * (1.0 - pc) * tc.window (k - 1) / 2.0;
      pk *= pc;
    }
  return sum / (1.0 - std::pow (pc, r));
}

std::vector<double>
collisionProbs (std::span<const double> tau, Tcs tcs)
{
  auto d = zoneOffsets (tcs);
  auto b = slotOccupancy (tau, tcs);
  std::vector<double> pc (tcs.size ());
  std::vector<double> zone (tcs.size ());
  for (std::size_t i = 0; i < tcs.size (); ++i)
    {
      for (std::size_t x = 0; x < tcs.size (); ++x)
        zone[x] = d[x] >= d[i] ? zoneCollisionProb (i, x, tau, tcs) : 0.0;
      pc[i] = avgCollisionProb (i, b, zone, tcs);
    }
  return pc;
}

FixedPointSolution
solveFixedPoint (Tcs tcs, const SolverOptions &opts)
{
  if (tcs.empty ())
    throw ConfigError ("solveFixedPoint: no traffic classes");
  for (const auto &tc : tcs)
    tc.validate ();

  const std::size_t n = tcs.size ();
  FixedPointSolution sol;
  sol.tau.resize (n);
  for (std::size_t i = 0; i < n; ++i)
    sol.tau[i] = tauFromBackoff (tcs[i].cwMin / 2.0);

  std::vector<double> next (n);
  double residual = 0.0;
  for (int it = 0; it <= opts.maxIterations; ++it)
    {
      sol.pc = collisionProbs (sol.tau, tcs);
      residual = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        {
          next[i] = tauFromBackoff (expectedBackoffSlots (tcs[i], sol.pc[i]));
          residual = std::max (residual, std::abs (next[i] - sol.tau[i]));
        }
      sol.iterations = it;
      if (residual < opts.tolerance)
        {
          sol.converged = true;
          break;
        }
      for (std::size_t i = 0; i < n; ++i)
        sol.tau[i] = (1.0 - opts.damping) * sol.tau[i] + opts.damping * next[i];
    }
  sol.residual = residual;
  if (!sol.converged)
    {
      std::ostringstream os;
      os << "solveFixedPoint: no convergence after " << opts.maxIterations
         << " iterations (residual " << residual << ")";
      throw ConvergenceError (os.str (), residual);
    }

  sol.eTbo.resize (n);
  for (std::size_t i = 0; i < n; ++i)
    sol.eTbo[i] = expectedBackoffSlots (tcs[i], sol.pc[i]);
  sol.bPrime = slotOccupancy (sol.tau, tcs);
  sol.gamma = successShare (sol.tau, tcs, sol.bPrime);
  if (n >= 2)
    sol.utilization = utilizationRatio (sol.gamma, tcs);
  return sol;
}

std::vector<double>
successShare (std::span<const double> tau, Tcs tcs, std::span<const double> bPrime)
{
  checkTau (tau, tcs);
  auto d = zoneOffsets (tcs);
  const int wMin = static_cast<int> (bPrime.size ());
  std::vector<double> gamma (tcs.size (), 0.0);
  std::vector<double> ps (tcs.size ());
  for (int n = 1; n <= wMin; ++n)
    {
      const double idle = idleProduct (n - 1, tau, tcs, d);
      double total = 0.0;
      for (std::size_t j = 0; j < tcs.size (); ++j)
        {
          ps[j] = d[j] + 1 <= n ? tcs[j].population * tau[j] / (1.0 - tau[j]) * idle : 0.0;
          total += ps[j];
        }
      if (total <= 0.0)
        {
          // idle product underflowed; the common factor cancels in the ratio
          for (std::size_t j = 0; j < tcs.size (); ++j)
            ps[j] = d[j] + 1 <= n ? tcs[j].population * tau[j] / (1.0 - tau[j]) : 0.0;
          total = std::accumulate (ps.begin (), ps.end (), 0.0);
          if (total <= 0.0)
            continue;
        }
      for (std::size_t j = 0; j < tcs.size (); ++j)
        gamma[j] += bPrime[n - 1] * ps[j] / total;
    }
  return gamma;
}

double
utilizationRatio (std::span<const double> gamma, Tcs tcs)
{
  if (gamma.size () < 2 || tcs.size () < 2)
    throw std::invalid_argument ("utilizationRatio: need an uplink and a downlink class");
  if (gamma[0] <= 0.0)
    throw std::domain_error ("utilizationRatio: uplink share is zero");
  return gamma[1] * tcs[1].nTxop / (gamma[0] * tcs[0].nTxop);
}

double
utilizationRatioEqualAifs (std::span<const double> tau, Tcs tcs)
{
  if (tau.size () < 2 || tcs.size () < 2)
    throw std::invalid_argument ("utilizationRatioEqualAifs: need an uplink and a downlink class");
  if (tcs[0].aifsn != tcs[1].aifsn)
    throw ConfigError ("utilizationRatioEqualAifs: AIFSN of the two classes differ");
  return (tcs[1].population * tau[1] * (1.0 - tau[0]) * tcs[1].nTxop)
         / (tcs[0].population * tau[0] * (1.0 - tau[1]) * tcs[0].nTxop);
}

namespace {

double
cwMinFromTauDirect (double tau, double pc, int m, int r)
{
  const double q = 1.0 - pc;
  const double num = (1.0 - std::pow (pc, r)) * (1.0 - 2.0 * pc) * q;
  const double den = q * q * (1.0 - std::pow (2.0 * pc, m + 1))
                     + std::ldexp (1.0, m) * std::pow (pc, m + 1) * (1.0 - 2.0 * pc) * q
                           * (1.0 - std::pow (pc, r - m - 1));
  return (2.0 - tau) / tau * num / den - 1.0;
}

} // namespace

double
cwMinFromTau (double tau, double pc, int m, int r, double cwCap)
{
  if (!(tau > 0.0 && tau < 1.0))
    throw std::domain_error ("cwMinFromTau: tau must lie in (0, 1)");
  if (!(pc >= 0.0 && pc < 1.0))
    throw std::domain_error ("cwMinFromTau: collision probability must lie in [0, 1)");
  if (m < 0 || m >= r)
    throw std::domain_error ("cwMinFromTau: need 0 <= m < r");

  constexpr double kSingularGap = 1e-9;
  double cw;
  if (std::abs (pc - 0.5) < kSingularGap)
    cw = 0.5 * (cwMinFromTauDirect (tau, 0.5 - kSingularGap, m, r)
                + cwMinFromTauDirect (tau, 0.5 + kSingularGap, m, r));
  else
    cw = cwMinFromTauDirect (tau, pc, m, r);

  if (!std::isfinite (cw) || cw > cwCap)
    throw InfeasiblePlan ("cwMinFromTau: CW_min above cap", cw, 0);
  return cw;
}

ApParameterPlan
computeApParameters (const TrafficClassParams &station, int nUplink, double requiredRatio,
                     std::span<const double> higherPriorityCw, const ApSearchOptions &opts)
{
  station.validate ();
  if (nUplink < 1)
    throw ConfigError ("computeApParameters: need at least one uplink station");
  if (!(requiredRatio > 0.0) || !std::isfinite (requiredRatio))
    throw ConfigError ("computeApParameters: required utilization ratio must be positive");

  TrafficClassParams sta = station;
  sta.population = nUplink;
  TrafficClassParams ap = station;
  ap.population = 1;
  ap.m = opts.apStages.value_or (station.m);
  ap.retryLimit = opts.apRetryLimit.value_or (station.retryLimit);

  double floorCw = 1.0;
  for (double cw : higherPriorityCw)
    floorCw = std::max (floorCw, cw);

  double lastCw = 0.0;
  for (int nTxop = opts.initialTxop; nTxop <= opts.maxTxop; nTxop *= 2)
    {
      ap.nTxop = nTxop;
      const std::array<TrafficClassParams, 2> tcs{sta, ap};
      const double uPrime = requiredRatio * sta.population * sta.nTxop / static_cast<double> (nTxop);

      auto apTau = [uPrime] (double tau0) {
        const double a = uPrime * tau0 / (1.0 - tau0);
        return a / (1.0 + a);
      };

      double tau0 = tauFromBackoff (sta.cwMin / 2.0);
      double residual = 1.0;
      for (int it = 0; it <= opts.solver.maxIterations; ++it)
        {
          const std::array<double, 2> tau{tau0, apTau (tau0)};
          const double pc0 = zoneCollisionProb (0, 1, tau, tcs);
          const double next = tauFromBackoff (expectedBackoffSlots (sta, pc0));
          residual = std::abs (next - tau0);
          if (residual < opts.solver.tolerance)
            break;
          tau0 = (1.0 - opts.solver.damping) * tau0 + opts.solver.damping * next;
        }
      if (!(residual < opts.solver.tolerance))
        throw ConvergenceError ("computeApParameters: station fixed point did not converge", residual);

      const std::array<double, 2> tau{tau0, apTau (tau0)};
      const double pc1 = zoneCollisionProb (1, 1, tau, tcs);
      double cw;
      try
        {
          cw = cwMinFromTau (tau[1], pc1, ap.m, ap.retryLimit, opts.cwCap);
        }
      catch (const InfeasiblePlan &e)
        {
          throw InfeasiblePlan (e.what (), e.lastCw (), nTxop);
        }
      lastCw = cw;
      if (cw < floorCw)
        continue;

      ApParameterPlan plan;
      plan.aifsn = ap.aifsn;
      plan.cwMin = cw;
      plan.nTxop = nTxop;
      plan.roundedCwMin = static_cast<int> (std::lround (cw));
      plan.tauStation = tau[0];
      plan.tauAp = tau[1];

      ap.cwMin = cw;
      const std::array<TrafficClassParams, 2> solved{sta, ap};
      plan.predictedUtilization = utilizationRatioEqualAifs (tau, solved);
      return plan;
    }

  std::ostringstream os;
  os << "computeApParameters: no plan with N_TXOP <= " << opts.maxTxop << " keeps CW_min >= " << floorCw
     << " (last candidate CW_min " << lastCw << ")";
  throw InfeasiblePlan (os.str (), lastCw, opts.maxTxop);
}

} // namespace analytics
} // namespace edca
