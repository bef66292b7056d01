#include "v2x/congestion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace v2x {

Scheme parse_scheme(std::string_view name) {
  if (name == "no_cc") return Scheme::no_cc;
  if (name == "cc" || name == "cc_rate_power") return Scheme::cc_rate_power;
  if (name == "rc_only" || name == "rate_only") return Scheme::rate_only;
  if (name == "oneshot_rc") return Scheme::oneshot_rc;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (no_cc | cc | rc_only | oneshot_rc)");
}

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::no_cc: return "no_cc";
    case Scheme::cc_rate_power: return "cc";
    case Scheme::rate_only: return "rc_only";
    case Scheme::oneshot_rc: return "oneshot_rc";
  }
  return "no_cc";
}

void CongestionConfig::validate() const {
  if (cbr_interval_ms <= 0) throw ConfigError("cbr_interval_ms must be positive");
  if (control_period_ms <= 0) throw ConfigError("control_period_ms must be positive");
  if (!(density_radius_m > 0.0)) throw ConfigError("density_radius_m must be positive");
  if (!(rate_activation_density > 0.0)) throw ConfigError("rate_activation_density must be positive");
  if (itt_filter_coefficient < 0.0 || itt_filter_coefficient > 1.0) {
    throw ConfigError("itt_filter_coefficient must lie in [0, 1]");
  }
  if (itt_min_ms <= 0 || itt_max_ms < itt_min_ms) throw ConfigError("invalid itt bounds");
  if (power_max_dbm < power_min_dbm) throw ConfigError("invalid power bounds");
  if (!(cbr_knee_high > cbr_knee_low)) throw ConfigError("cbr_knee_high must exceed cbr_knee_low");
}

double CbrTracker::close_interval() {
  if (measurable_ > 0) {
    last_cbr_ = static_cast<double>(busy_) / static_cast<double>(measurable_);
  }
  busy_ = 0;
  measurable_ = 0;
  return last_cbr_;
}

double update_cbr(CbrTracker& tracker, std::span<const std::pair<ResourceId, double>> measurements) {
  for (const auto& m : measurements) tracker.add(m.second);
  return tracker.close_interval();
}

DensityEstimate density_from_count(int neighbours, double radius_m) {
  return {static_cast<double>(neighbours) * 100.0 / (2.0 * radius_m)};
}

CongestionState make_congestion_state(Scheme scheme, const CongestionConfig& cfg) {
  CongestionState s;
  s.scheme = scheme;
  s.itt_filtered_ms = cfg.itt_min_ms;
  s.itt_ms = cfg.itt_min_ms;
  s.tx_power_dbm = cfg.power_max_dbm;
  return s;
}

int rate_control(const DensityEstimate& density, CongestionState& state, const CongestionConfig& cfg) {
  if (!uses_rate_control(state.scheme)) {
    state.itt_ms = cfg.itt_min_ms;
    return state.itt_ms;
  }
  const double target =
      cfg.itt_min_ms * std::max(1.0, density.vehicles_per_100m / cfg.rate_activation_density);
  const double a = cfg.itt_filter_coefficient;
  state.itt_filtered_ms = a * state.itt_filtered_ms + (1.0 - a) * target;
  const double clamped = std::clamp(state.itt_filtered_ms, static_cast<double>(cfg.itt_min_ms),
                                    static_cast<double>(cfg.itt_max_ms));
  state.itt_ms = static_cast<int>(std::lround(clamped));
  return state.itt_ms;
}

double power_control(double cbr, CongestionState& state, const CongestionConfig& cfg) {
  if (!uses_power_control(state.scheme)) {
    state.tx_power_dbm = cfg.power_max_dbm;
    return state.tx_power_dbm;
  }
  double p;
  if (cbr <= cfg.cbr_knee_low) {
    p = cfg.power_max_dbm;
  } else if (cbr >= cfg.cbr_knee_high) {
    p = cfg.power_min_dbm;
  } else {
    const double f = (cbr - cfg.cbr_knee_low) / (cfg.cbr_knee_high - cfg.cbr_knee_low);
    p = cfg.power_max_dbm - f * (cfg.power_max_dbm - cfg.power_min_dbm);
  }
  state.tx_power_dbm = std::clamp(p, cfg.power_min_dbm, cfg.power_max_dbm);
  return state.tx_power_dbm;
}

}  // namespace v2x
