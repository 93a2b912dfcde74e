#include "edca/adapt.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <sstream>

namespace edca {

void
AdaptationConfig::validate () const
{
  if (beta < 1)
    throw ConfigError ("AdaptationConfig: beta must be >= 1");
  if (alpha < 0.0 || alpha > 1.0)
    throw ConfigError ("AdaptationConfig: alpha must be in [0, 1]");
  if (!(beaconInterval > 0.0))
    throw ConfigError ("AdaptationConfig: beacon interval must be positive");
}

bool
FlowRegistry::update (const std::set<int> &uplinkSources, const std::set<int> &downlinkDestinations)
{
  const bool changed = uplinkSources != m_up || downlinkDestinations != m_down;
  m_up = uplinkSources;
  m_down = downlinkDestinations;
  return changed;
}

std::optional<double>
requiredUtilization (int nUplink, int nDownlink)
{
  if (nUplink <= 0)
    return std::nullopt;
  return static_cast<double> (nDownlink) / nUplink;
}

int
fineTuneStep (double requiredRatio, double measuredRatio, double alpha)
{
  if (measuredRatio < (1.0 - alpha) * requiredRatio)
    return -1;
  if (measuredRatio > (1.0 + alpha) * requiredRatio)
    return 1;
  return 0;
}

int
txopPressureControl (std::size_t queueLength, std::size_t th, int analyticTxop)
{
  return queueLength > th ? 2 * analyticTxop : analyticTxop;
}

EncodedCw
encodeStationCw (int cw)
{
  if (cw < 0 || cw > 32767)
    throw ConfigError ("station CW " + std::to_string (cw) + " cannot be encoded");
  int e = 0;
  while ((1 << e) - 1 < cw)
    ++e;
  return {e, (1 << e) - 1};
}

bool
qosGuard (double cw, const std::vector<double> &higherPriorityCw)
{
  for (double h : higherPriorityCw)
    if (cw < h)
      return false;
  return true;
}

// ---------------------------------------------------------------------------

AdaptiveController::AdaptiveController (std::vector<AcSetup> acs, const AdaptationConfig &cfg,
                                        ControllerMode mode, BackoffMode apBackoff)
  : m_cfg (cfg), m_mode (mode), m_apBackoff (apBackoff)
{
  cfg.validate ();
  for (auto &a : acs)
    {
      a.station.validate ();
      a.apInitial.validate ();
      AcState s;
      s.setup = a;
      s.ap = a.apInitial;
      s.lastEffectiveTxop = a.apInitial.nTxop;
      m_state.push_back (std::move (s));
    }
}

std::vector<double>
AdaptiveController::higherPriorityCw (int ac) const
{
  std::vector<double> out;
  for (int k = 0; k < ac; ++k)
    if (m_state[k].setup.kind == AcKind::Realtime)
      {
        out.push_back (m_state[k].setup.station.cwMin);
        out.push_back (m_state[k].ap.cwMin);
      }
  return out;
}

bool
AdaptiveController::recompute (int ac, int initialTxop, double now, BeaconOutcome &out)
{
  auto &s = m_state[ac];
  const int nU = s.registry.nUplink ();
  analytics::ApSearchOptions opts;
  opts.initialTxop = initialTxop;
  const auto floor = higherPriorityCw (ac);
  try
    {
      const auto plan = analytics::computeApParameters (s.setup.station, nU, *s.ratio, floor, opts);
      s.ap.aifsn = plan.aifsn;
      s.ap.cwMin = m_apBackoff == BackoffMode::Fractional ? plan.cwMin : plan.roundedCwMin;
      s.ap.nTxop = plan.nTxop;
      s.ap.m = s.setup.station.m;
      s.ap.retryLimit = s.setup.station.retryLimit;
      out.updates.push_back ({ac, s.ap});
      SPDLOG_DEBUG ("t={:.2f} AC{} n_u={} n_d={} U_r={:.3f} -> CW_min={:.3f} N_TXOP={}", now, ac, nU,
                    s.registry.nDownlink (), *s.ratio, s.ap.cwMin, s.ap.nTxop);
      return true;
    }
  catch (const analytics::InfeasiblePlan &e)
    {
      std::ostringstream msg;
      msg << "t=" << now << " AC" << ac << ": infeasible plan (" << e.what () << "), parameters kept";
      out.annotations.push_back (msg.str ());
    }
  catch (const analytics::ConvergenceError &e)
    {
      std::ostringstream msg;
      msg << "t=" << now << " AC" << ac << ": solver did not converge (" << e.what () << "), parameters kept";
      out.annotations.push_back (msg.str ());
    }
  return false;
}

void
AdaptiveController::tick (double now, BeaconOutcome &out)
{
  for (int ac = 0; ac < static_cast<int> (m_state.size ()); ++ac)
    {
      auto &s = m_state[ac];
      if (s.setup.kind == AcKind::Realtime)
        continue;

      const bool changed = s.registry.update (s.seenUp, s.seenDown);
      const auto ratio = requiredUtilization (s.registry.nUplink (), s.registry.nDownlink ());
      const double measured = s.successesUp > 0 ? static_cast<double> (s.successesDown) / s.successesUp
                                                : std::numeric_limits<double>::quiet_NaN ();

      if (ratio && *ratio > 0.0)
        {
          if (changed || !s.ratio)
            {
              s.ratio = ratio;
              recompute (ac, 1, now, out);
            }
          else if (m_mode == ControllerMode::Full && s.setup.kind == AcKind::Udp && s.successesUp > 0)
            {
              const int step = fineTuneStep (*s.ratio, measured, m_cfg.alpha);
              if (step != 0)
                {
                  const double cw = std::max (1.0, s.ap.cwMin + step);
                  if (qosGuard (cw, higherPriorityCw (ac)))
                    {
                      s.ap.cwMin = cw;
                      out.updates.push_back ({ac, s.ap});
                    }
                  else
                    recompute (ac, 2 * s.ap.nTxop, now, out);
                }
            }
        }

      out.intervals.push_back ({now, ac, measured, s.ap.cwMin, s.lastEffectiveTxop});
      s.seenUp.clear ();
      s.seenDown.clear ();
      s.successesUp = 0;
      s.successesDown = 0;
    }
}

BeaconOutcome
AdaptiveController::onBeacon (const BeaconObservation &obs)
{
  BeaconOutcome out;
  for (std::size_t ac = 0; ac < obs.perAc.size () && ac < m_state.size (); ++ac)
    {
      auto &s = m_state[ac];
      const auto &o = obs.perAc[ac];
      s.seenUp.insert (o.uplinkSources.begin (), o.uplinkSources.end ());
      s.seenDown.insert (o.downlinkDestinations.begin (), o.downlinkDestinations.end ());
      s.successesUp += o.successesUp;
      s.successesDown += o.successesDown;
    }
  if (++m_beacons % m_cfg.beta == 0)
    tick (obs.time, out);

  for (std::size_t ac = 0; ac < m_state.size (); ++ac)
    {
      const auto &p = m_state[ac].setup.station;
      out.beacon.push_back ({obs.time, static_cast<int> (ac), p.aifsn,
                             encodeStationCw (static_cast<int> (p.cwMin)).exponent,
                             encodeStationCw (static_cast<int> (p.cwMax ())).exponent, p.nTxop});
    }
  return out;
}

int
AdaptiveController::effectiveTxop (int ac, int analyticTxop, std::size_t queueLength)
{
  auto &s = m_state[ac];
  int txop = analyticTxop;
  if (m_mode == ControllerMode::Full && s.setup.kind == AcKind::Tcp)
    txop = txopPressureControl (queueLength, m_cfg.th, analyticTxop);
  s.lastEffectiveTxop = txop;
  return txop;
}

} // namespace edca
