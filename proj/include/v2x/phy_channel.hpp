#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "v2x/resource_grid.hpp"
#include "v2x/types.hpp"

namespace v2x {

/// Dual-slope log-distance path loss with per-link lognormal shadowing.
struct ChannelConfig {
  double pl0_db = 47.0;
  double exponent_near = 2.75;
  double exponent_far = 3.5;
  double breakpoint_m = 200.0;
  double shadowing_sigma_db = 3.0;
  double shadowing_decorrelation_m = 10.0;
  double noise_figure_db = 6.0;
  double thermal_noise_density_dbm_hz = -174.0;
  double carrier_frequency_ghz = 5.89;
  double antenna_height_m = 1.6;
  double sensitivity_dbm = -103.5;
  double sinr_threshold_db = 5.0;

  void validate() const;
};

struct TransmissionEvent {
  std::uint64_t packet_id = 0;
  VueId tx = 0;
  Subframe subframe = 0;
  int subchannel_start = 0;
  int subchannel_count = 1;
  double tx_power_dbm = 23.0;
  /// Advertised reservation interval; 0 reserves nothing.
  int rri_ms = 100;

  bool overlaps(int subchannel) const {
    return subchannel >= subchannel_start && subchannel < subchannel_start + subchannel_count;
  }
  bool same_subchannels(const TransmissionEvent& o) const {
    return subchannel_start == o.subchannel_start && subchannel_count == o.subchannel_count;
  }
};

struct LinkSample {
  VueId tx_vue = 0;
  VueId rx_vue = 0;
  double distance_m = 0.0;
  double rx_power_dbm = 0.0;
  Subframe subframe_index = 0;
};

enum class FailureCause : std::uint8_t {
  none,
  half_duplex,
  below_sensitivity,
  sinr_fail,
  collision_same_resource,
};

std::string_view to_string(FailureCause c);

struct ReceptionOutcome {
  std::uint64_t packet_id = 0;
  VueId tx = 0;
  VueId rx = 0;
  Subframe subframe = 0;
  bool success = false;
  double sinr_db = 0.0;
  double rx_power_dbm = 0.0;
  FailureCause failure_cause = FailureCause::none;
};

double pathloss_db(double distance_m, const ChannelConfig& cfg);

/// Linear path gain, 10^(-pathloss_db / 10), evaluated with a single pow.
class PathGain {
 public:
  explicit PathGain(const ChannelConfig& cfg);
  double operator()(double distance_m) const;

 private:
  double breakpoint_m_;
  double near_scale_;
  double far_scale_;
  double near_exponent_;
  double far_exponent_;
};

/// Thermal noise plus noise figure over `bandwidth_hz`.
double noise_floor_dbm(double bandwidth_hz, const ChannelConfig& cfg);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// Per-link shadowing, drawn per unordered pair and redrawn every
/// `shadowing_decorrelation_m` of relative displacement. A pure function of
/// (seed, pair, epoch); a full N x N table caches the latest epoch's linear
/// factor per pair.
class ShadowingField {
 public:
  ShadowingField(std::uint64_t seed, const ChannelConfig& cfg, std::size_t vue_count);

  double shadow_db(VueId a, VueId b, double relative_displacement_m);
  /// The same draw as a linear factor, 10^(-shadow_db / 10).
  double shadow_gain(VueId a, VueId b, double relative_displacement_m);

 private:
  struct Entry {
    std::int32_t epoch = -1;
    float gain = 1.0f;
  };
  double draw(VueId lo, VueId hi, std::int64_t epoch) const;
  std::int64_t epoch_of(double relative_displacement_m) const;

  std::uint64_t seed_;
  double sigma_db_;
  double decorrelation_m_;
  std::size_t vue_count_;
  std::vector<Entry> cache_;
};

/// Precomputed linear-domain constants shared by every reception decision.
struct PhyParams {
  double noise_per_subchannel_mw = 0.0;
  double sensitivity_mw = 0.0;
  double sinr_threshold_linear = 0.0;
  int subchannels = 0;
  /// Optional packet error curve (BLER as a function of SINR in dB). When set
  /// it replaces the SINR threshold; the draw is a pure function of `bler_seed`,
  /// packet and receiver.
  std::function<double(double)> bler_curve;
  std::uint64_t bler_seed = 0;

  static PhyParams make(const GridConfig& grid, const ChannelConfig& cfg);
};

/// Resolves every transmission of one subframe at one receiver.
///
/// `rx_power_mw[i]` is the received power of `events[i]`; the SINR of a
/// packet is its power over the linear sum of every other transmission's power
/// falling in the packet's subchannels plus thermal noise over those
/// subchannels. A transmitter's power is spread evenly over its subchannels.
/// Writes per-subchannel RSSI (mW) to `rssi_mw` when the receiver is idle.
void resolve_receiver(VueId rx, bool rx_transmitting, std::span<const TransmissionEvent> events,
                      std::span<const double> rx_power_mw, const PhyParams& phy,
                      std::span<ReceptionOutcome> out, std::span<double> rssi_mw);

/// Received power of a transmission at a receiver, in dBm.
using RxPowerFn = std::function<double(const TransmissionEvent&)>;

/// Outcome of `tx` at receiver `rx` given all transmissions of the subframe
/// (`concurrent` may or may not include `tx` itself).
ReceptionOutcome receive(const TransmissionEvent& tx, VueId rx, bool rx_transmitting,
                         std::span<const TransmissionEvent> concurrent, const RxPowerFn& rx_power_dbm,
                         const GridConfig& grid, const ChannelConfig& cfg);

/// RSSI on one resource: linear sum of the per-subchannel received powers of
/// overlapping transmissions plus the subchannel noise floor. Empty when the
/// receiver transmits in that subframe (unmeasurable).
std::optional<double> measure_rssi(const ResourceId& resource, std::span<const TransmissionEvent> events,
                                   bool rx_transmitting, const RxPowerFn& rx_power_dbm,
                                   const GridConfig& grid, const ChannelConfig& cfg);

}  // namespace v2x
