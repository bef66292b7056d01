#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "v2x/resource_grid.hpp"

namespace v2x {

enum class Scheme { no_cc, cc_rate_power, rate_only, oneshot_rc };

/// Accepts the CLI names (no_cc, cc, rc_only, oneshot_rc) and the long names.
Scheme parse_scheme(std::string_view name);
/// CLI name of the scheme.
std::string_view to_string(Scheme s);

inline bool uses_rate_control(Scheme s) { return s != Scheme::no_cc; }
inline bool uses_power_control(Scheme s) { return s == Scheme::cc_rate_power; }
inline bool uses_oneshot(Scheme s) { return s == Scheme::oneshot_rc; }

enum class DensitySource { reception, ground_truth };

struct CongestionConfig {
  double cbr_threshold_dbm = -92.0;
  int cbr_interval_ms = 100;
  int control_period_ms = 1000;
  double density_radius_m = 100.0;
  DensitySource density_source = DensitySource::reception;
  double rate_activation_density = 30.0;
  double itt_filter_coefficient = 0.5;
  int itt_min_ms = 100;
  int itt_max_ms = 600;
  double power_max_dbm = 23.0;
  double power_min_dbm = 10.0;
  double cbr_knee_low = 0.65;
  double cbr_knee_high = 0.80;

  void validate() const;
};

/// Channel busy ratio over fixed measurement intervals: the fraction of
/// measurable subchannel resources whose RSSI exceeds the threshold.
class CbrTracker {
 public:
  explicit CbrTracker(double threshold_dbm = -92.0) : threshold_dbm_(threshold_dbm) {}

  void add(double rssi_dbm) {
    ++measurable_;
    if (rssi_dbm > threshold_dbm_) ++busy_;
  }
  /// Counts-based form used by the simulation loop.
  void add_counts(int busy, int measurable) {
    busy_ += busy;
    measurable_ += measurable;
  }
  /// Ends the interval. With nothing measurable the previous CBR carries forward.
  double close_interval();

  double last_cbr() const { return last_cbr_; }
  double threshold_dbm() const { return threshold_dbm_; }

 private:
  double threshold_dbm_;
  long busy_ = 0;
  long measurable_ = 0;
  double last_cbr_ = 0.0;
};

/// Closes one interval made of exactly `measurements` (unmeasurable resources
/// already removed) and returns the stored CBR.
double update_cbr(CbrTracker& tracker, std::span<const std::pair<ResourceId, double>> measurements);

struct DensityEstimate {
  double vehicles_per_100m = 0.0;
};

/// Converts a neighbour count inside +/- radius into vehicles per 100 m.
DensityEstimate density_from_count(int neighbours, double radius_m);

struct CongestionState {
  Scheme scheme = Scheme::no_cc;
  double itt_filtered_ms = 100.0;
  int itt_ms = 100;
  double tx_power_dbm = 23.0;
};

CongestionState make_congestion_state(Scheme scheme, const CongestionConfig& cfg);

/// Density-driven inter-transmission time: target 100 * max(1, density / 30)
/// through a first-order filter, then clamped and rounded to whole ms.
int rate_control(const DensityEstimate& density, CongestionState& state, const CongestionConfig& cfg);

/// Two-knee CBR power law: full power up to the low knee, linear down to the
/// minimum at the high knee.
double power_control(double cbr, CongestionState& state, const CongestionConfig& cfg);

}  // namespace v2x
