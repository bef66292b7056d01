#include "v2x/phy_channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "v2x/rng.hpp"

namespace v2x {

void ChannelConfig::validate() const {
  if (exponent_near < 2.0 || exponent_far < 2.0) {
    throw ConfigError("path loss exponents must be >= 2");
  }
  if (!(breakpoint_m > 1.0)) throw ConfigError("breakpoint_m must exceed 1 m");
  if (shadowing_sigma_db < 0.0) throw ConfigError("shadowing_sigma_db must be >= 0");
  if (!(shadowing_decorrelation_m > 0.0)) {
    throw ConfigError("shadowing_decorrelation_m must be positive");
  }
}

std::string_view to_string(FailureCause c) {
  switch (c) {
    case FailureCause::none: return "none";
    case FailureCause::half_duplex: return "half_duplex";
    case FailureCause::below_sensitivity: return "below_sensitivity";
    case FailureCause::sinr_fail: return "sinr_fail";
    case FailureCause::collision_same_resource: return "collision_same_resource";
  }
  return "unknown";
}

double pathloss_db(double distance_m, const ChannelConfig& cfg) {
  const double d = std::max(distance_m, 1.0);
  if (d <= cfg.breakpoint_m) return cfg.pl0_db + 10.0 * cfg.exponent_near * std::log10(d);
  return cfg.pl0_db + 10.0 * cfg.exponent_near * std::log10(cfg.breakpoint_m) +
         10.0 * cfg.exponent_far * std::log10(d / cfg.breakpoint_m);
}

PathGain::PathGain(const ChannelConfig& cfg)
    : breakpoint_m_(cfg.breakpoint_m),
      near_scale_(std::pow(10.0, -cfg.pl0_db / 10.0)),
      far_scale_(std::pow(10.0, -pathloss_db(cfg.breakpoint_m, cfg) / 10.0) *
                 std::pow(cfg.breakpoint_m, cfg.exponent_far)),
      near_exponent_(-cfg.exponent_near),
      far_exponent_(-cfg.exponent_far) {}

double PathGain::operator()(double distance_m) const {
  const double d = std::max(distance_m, 1.0);
  if (d <= breakpoint_m_) return near_scale_ * std::pow(d, near_exponent_);
  return far_scale_ * std::pow(d, far_exponent_);
}

double noise_floor_dbm(double bandwidth_hz, const ChannelConfig& cfg) {
  return cfg.thermal_noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz) + cfg.noise_figure_db;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) {
  if (mw <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mw);
}

ShadowingField::ShadowingField(std::uint64_t seed, const ChannelConfig& cfg, std::size_t vue_count)
    : seed_(seed),
      sigma_db_(cfg.shadowing_sigma_db),
      decorrelation_m_(cfg.shadowing_decorrelation_m),
      vue_count_(vue_count),
      cache_(vue_count * vue_count) {}

double ShadowingField::draw(VueId lo, VueId hi, std::int64_t epoch) const {
  return sigma_db_ * hashed_normal(hash_words(seed_, lo, hi, static_cast<std::uint64_t>(epoch)));
}

std::int64_t ShadowingField::epoch_of(double relative_displacement_m) const {
  return static_cast<std::int64_t>(std::floor(std::abs(relative_displacement_m) / decorrelation_m_));
}

double ShadowingField::shadow_db(VueId a, VueId b, double relative_displacement_m) {
  if (sigma_db_ == 0.0 || a == b) return 0.0;
  return draw(std::min(a, b), std::max(a, b), epoch_of(relative_displacement_m));
}

double ShadowingField::shadow_gain(VueId a, VueId b, double relative_displacement_m) {
  if (sigma_db_ == 0.0 || a == b) return 1.0;
  const std::int64_t epoch = epoch_of(relative_displacement_m);
  auto gain_of = [&] {
    return static_cast<float>(std::pow(10.0, -draw(std::min(a, b), std::max(a, b), epoch) / 10.0));
  };
  if (a >= vue_count_ || b >= vue_count_ || epoch > std::numeric_limits<std::int32_t>::max()) return gain_of();
  Entry& e = cache_[static_cast<std::size_t>(a) * vue_count_ + b];
  if (e.epoch != epoch) {
    e = Entry{static_cast<std::int32_t>(epoch), gain_of()};
    cache_[static_cast<std::size_t>(b) * vue_count_ + a] = e;
  }
  return e.gain;
}

PhyParams PhyParams::make(const GridConfig& grid, const ChannelConfig& cfg) {
  PhyParams p;
  p.noise_per_subchannel_mw =
      dbm_to_mw(noise_floor_dbm(grid.subchannel_size_rb * kResourceBlockHz, cfg));
  p.sensitivity_mw = dbm_to_mw(cfg.sensitivity_dbm);
  p.sinr_threshold_linear = std::pow(10.0, cfg.sinr_threshold_db / 10.0);
  p.subchannels = grid.subchannels_per_subframe;
  return p;
}

namespace {

constexpr int kMaxSubchannels = 64;

int overlap(const TransmissionEvent& a, const TransmissionEvent& b) {
  const int lo = std::max(a.subchannel_start, b.subchannel_start);
  const int hi = std::min(a.subchannel_start + a.subchannel_count,
                          b.subchannel_start + b.subchannel_count);
  return std::max(0, hi - lo);
}

}  // namespace

void resolve_receiver(VueId rx, bool rx_transmitting, std::span<const TransmissionEvent> events,
                      std::span<const double> rx_power_mw, const PhyParams& phy,
                      std::span<ReceptionOutcome> out, std::span<double> rssi_mw) {
  const std::size_t n = events.size();
  for (std::size_t j = 0; j < n; ++j) {
    ReceptionOutcome& o = out[j];
    o.packet_id = events[j].packet_id;
    o.tx = events[j].tx;
    o.rx = rx;
    o.subframe = events[j].subframe;
    o.rx_power_dbm = mw_to_dbm(rx_power_mw[j]);
    o.success = false;
    o.failure_cause = FailureCause::none;
    o.sinr_db = -std::numeric_limits<double>::infinity();
  }
  if (rx_transmitting) {
    for (std::size_t j = 0; j < n; ++j) out[j].failure_cause = FailureCause::half_duplex;
    return;
  }

  if (!rssi_mw.empty()) {
    std::array<double, kMaxSubchannels> per_sc{};
    for (std::size_t i = 0; i < n; ++i) {
      const double share = rx_power_mw[i] / events[i].subchannel_count;
      for (int s = events[i].subchannel_start;
           s < events[i].subchannel_start + events[i].subchannel_count && s < kMaxSubchannels; ++s) {
        per_sc[static_cast<std::size_t>(s)] += share;
      }
    }
    for (std::size_t s = 0; s < rssi_mw.size(); ++s) {
      rssi_mw[s] = per_sc[s] + phy.noise_per_subchannel_mw;
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    const TransmissionEvent& ej = events[j];
    ReceptionOutcome& o = out[j];
    if (ej.tx == rx) {
      o.failure_cause = FailureCause::half_duplex;
      continue;
    }
    double interference = 0.0;
    bool same_resource = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      const int ov = overlap(events[i], ej);
      if (ov == 0) continue;
      interference += rx_power_mw[i] * ov / events[i].subchannel_count;
      same_resource = same_resource || events[i].same_subchannels(ej);
    }
    const double signal = rx_power_mw[j];
    const double sinr = signal / (interference + phy.noise_per_subchannel_mw * ej.subchannel_count);
    o.sinr_db = 10.0 * std::log10(sinr);
    if (signal < phy.sensitivity_mw) {
      o.failure_cause = FailureCause::below_sensitivity;
      continue;
    }
    bool ok;
    if (phy.bler_curve) {
      const double bler = phy.bler_curve(o.sinr_db);
      ok = unit_from_bits(hash_words(phy.bler_seed, ej.packet_id, rx)) >= bler;
    } else {
      ok = sinr >= phy.sinr_threshold_linear;
    }
    if (ok) {
      o.success = true;
    } else {
      o.failure_cause = same_resource ? FailureCause::collision_same_resource : FailureCause::sinr_fail;
    }
  }
}

ReceptionOutcome receive(const TransmissionEvent& tx, VueId rx, bool rx_transmitting,
                         std::span<const TransmissionEvent> concurrent, const RxPowerFn& rx_power_dbm,
                         const GridConfig& grid, const ChannelConfig& cfg) {
  std::vector<TransmissionEvent> events;
  events.reserve(concurrent.size() + 1);
  events.push_back(tx);
  for (const auto& e : concurrent) {
    if (e.packet_id == tx.packet_id && e.tx == tx.tx) continue;
    events.push_back(e);
  }
  std::vector<double> power(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) power[i] = dbm_to_mw(rx_power_dbm(events[i]));
  std::vector<ReceptionOutcome> out(events.size());
  const PhyParams phy = PhyParams::make(grid, cfg);
  resolve_receiver(rx, rx_transmitting, events, power, phy, out, {});
  return out.front();
}

std::optional<double> measure_rssi(const ResourceId& resource, std::span<const TransmissionEvent> events,
                                   bool rx_transmitting, const RxPowerFn& rx_power_dbm,
                                   const GridConfig& grid, const ChannelConfig& cfg) {
  if (rx_transmitting) return std::nullopt;
  double total = dbm_to_mw(noise_floor_dbm(grid.subchannel_size_rb * kResourceBlockHz, cfg));
  for (const auto& e : events) {
    if (e.subframe != resource.subframe || !e.overlaps(resource.subchannel)) continue;
    total += dbm_to_mw(rx_power_dbm(e)) / e.subchannel_count;
  }
  return mw_to_dbm(total);
}

}  // namespace v2x
