#include "edca/params.hpp"

#include <algorithm>
#include <cmath>

namespace edca {

void
PhyTiming::validate () const
{
  if (slotTime <= 0 || sifs <= 0 || dataRate <= 0 || basicRate <= 0 || phyOverhead <= 0)
    throw ConfigError ("PhyTiming: all durations and rates must be positive");
  if (macHeaderBytes <= 0 || ackBytes <= 0)
    throw ConfigError ("PhyTiming: frame overheads must be positive");
  if (basicRate > dataRate)
    throw ConfigError ("PhyTiming: basic rate exceeds data rate");
}

double
PhyTiming::dataFrameDuration (int payloadBytes) const
{
  return phyOverhead + (macHeaderBytes + payloadBytes) * 8.0 / dataRate;
}

double
PhyTiming::ackDuration () const
{
  return phyOverhead + ackBytes * 8.0 / basicRate;
}

double
PhyTiming::exchangeDuration (int payloadBytes) const
{
  return dataFrameDuration (payloadBytes) + sifs + ackDuration ();
}

void
TrafficClassParams::validate () const
{
  if (aifsn < 1)
    throw ConfigError ("TrafficClassParams: aifsn must be >= 1");
  if (!(cwMin >= 1.0))
    throw ConfigError ("TrafficClassParams: cwMin must be >= 1");
  if (m < 0)
    throw ConfigError ("TrafficClassParams: m must be >= 0");
  if (retryLimit < 1 || m >= retryLimit)
    throw ConfigError ("TrafficClassParams: need 0 <= m < retryLimit");
  if (nTxop < 1)
    throw ConfigError ("TrafficClassParams: nTxop must be >= 1");
  if (population < 1)
    throw ConfigError ("TrafficClassParams: population must be >= 1");
}

double
TrafficClassParams::cwMax () const
{
  return std::ldexp (cwMin + 1.0, m) - 1.0;
}

double
TrafficClassParams::window (int stage) const
{
  return std::ldexp (cwMin + 1.0, std::min (stage, m)) - 1.0;
}

int
stagesFor (double cwMin, double cwMax)
{
  int m = 0;
  while (std::ldexp (cwMin + 1.0, m) - 1.0 < cwMax - 1e-9)
    ++m;
  return m;
}

} // namespace edca
