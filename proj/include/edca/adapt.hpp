#ifndef EDCA_ADAPT_HPP
#define EDCA_ADAPT_HPP

#include "edca/analytics.hpp"
#include "edca/sim.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace edca {

struct AdaptationConfig
{
  int beta = 5;               // beacon intervals per adaptation interval
  double alpha = 0.5;         // dead-band half width, relative to U_r
  std::size_t th = 50;        // AP queue threshold for TXOP doubling, packets
  double beaconInterval = 0.1;

  void validate () const;
};

/**
 * Active-flow estimate of one access category, built from the MAC addresses
 * the AP sees. An address not seen for one whole adaptation interval is
 * dropped.
 */
class FlowRegistry
{
public:
  /// Folds in one adaptation interval's addresses. Returns true when the
  /// registry gained or lost an entry.
  bool update (const std::set<int> &uplinkSources, const std::set<int> &downlinkDestinations);

  int nUplink () const { return static_cast<int> (m_up.size ()); }
  int nDownlink () const { return static_cast<int> (m_down.size ()); }

private:
  std::set<int> m_up;
  std::set<int> m_down;
};

/// U_r = n_d / n_u; nothing when there is no uplink flow to balance against.
std::optional<double> requiredUtilization (int nUplink, int nDownlink);

/// CW_min step for the AP: -1 if the measured ratio is below (1-alpha) U_r,
/// +1 above (1+alpha) U_r, 0 inside the dead band.
int fineTuneStep (double requiredRatio, double measuredRatio, double alpha);

/// TXOP actually used by a TCP access category given its queue length.
int txopPressureControl (std::size_t queueLength, std::size_t th, int analyticTxop);

struct EncodedCw
{
  int exponent = 0;
  int value = 0;  // 2^exponent - 1
};

/// Station CWs travel as 4-bit exponents; rounds up to the next 2^e - 1.
EncodedCw encodeStationCw (int cw);

/// True when `cw` keeps the priority ordering against every higher-priority CW_min.
bool qosGuard (double cw, const std::vector<double> &higherPriorityCw);

enum class AcKind
{
  Udp,
  Tcp,
  Realtime
};

enum class ControllerMode
{
  Analytic,  // recompute on population change only
  Full       // plus CW fine-tuning (UDP) and TXOP pressure control (TCP)
};

/// One access category as the controller sees it. Index order is priority order.
struct AcSetup
{
  AcKind kind = AcKind::Udp;
  TrafficClassParams station;
  TrafficClassParams apInitial;
};

class AdaptiveController : public AdaptationHook
{
public:
  AdaptiveController (std::vector<AcSetup> acs, const AdaptationConfig &cfg, ControllerMode mode,
                      BackoffMode apBackoff = BackoffMode::Fractional);

  BeaconOutcome onBeacon (const BeaconObservation &obs) override;
  int effectiveTxop (int ac, int analyticTxop, std::size_t queueLength) override;

  const TrafficClassParams &apParams (int ac) const { return m_state[ac].ap; }
  const FlowRegistry &registry (int ac) const { return m_state[ac].registry; }

private:
  struct AcState
  {
    AcSetup setup;
    TrafficClassParams ap;
    FlowRegistry registry;
    std::set<int> seenUp;
    std::set<int> seenDown;
    std::int64_t successesUp = 0;
    std::int64_t successesDown = 0;
    std::optional<double> ratio;
    int lastEffectiveTxop = 1;
  };

  void tick (double now, BeaconOutcome &out);
  std::vector<double> higherPriorityCw (int ac) const;
  bool recompute (int ac, int initialTxop, double now, BeaconOutcome &out);

  std::vector<AcState> m_state;
  AdaptationConfig m_cfg;
  ControllerMode m_mode;
  BackoffMode m_apBackoff;
  int m_beacons = 0;
};

} // namespace edca

#endif
