#ifndef EDCA_PARAMS_HPP
#define EDCA_PARAMS_HPP

#include <stdexcept>
#include <string>

namespace edca {

/// Raised when a parameter set violates its documented invariants.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/**
 * PHY/MAC timing used both by the analytical throughput arithmetic and the
 * simulator. All durations are in seconds, rates in bit/s.
 *
 * Defaults describe an 802.11g BSS at 54 Mbit/s data and 6 Mbit/s basic rate.
 */
struct PhyTiming
{
  double slotTime = 9e-6;
  double sifs = 10e-6;
  double dataRate = 54e6;
  double basicRate = 6e6;
  double phyOverhead = 20e-6;  // preamble + PLCP header
  int macHeaderBytes = 28;
  int ackBytes = 14;

  void validate () const;

  /// SIFS + aifsn * slot.
  double aifs (int aifsn) const { return sifs + aifsn * slotTime; }
  /// Air time of one data frame carrying `payloadBytes` above the MAC.
  double dataFrameDuration (int payloadBytes) const;
  double ackDuration () const;
  /// DATA + SIFS + ACK.
  double exchangeDuration (int payloadBytes) const;
};

/**
 * EDCA knobs of one traffic class and the number of contenders sharing them.
 *
 * The contention window at backoff stage k (0-based) is
 * 2^min(k, m) * (cwMin + 1) - 1, so cwMax = 2^m * (cwMin + 1) - 1.
 * cwMin may be fractional for an AP-side class.
 */
struct TrafficClassParams
{
  int aifsn = 2;
  double cwMin = 15.0;
  int m = 4;
  int retryLimit = 7;
  int nTxop = 1;
  int population = 1;

  void validate () const;

  double cwMax () const;
  double window (int stage) const;
};

/// Smallest m such that 2^m * (cwMin + 1) - 1 >= cwMax.
int stagesFor (double cwMin, double cwMax);

} // namespace edca

#endif
