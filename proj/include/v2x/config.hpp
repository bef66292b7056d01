#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "v2x/congestion.hpp"
#include "v2x/metrics.hpp"
#include "v2x/oneshot.hpp"
#include "v2x/phy_channel.hpp"
#include "v2x/resource_grid.hpp"
#include "v2x/sbsps.hpp"
#include "v2x/scenario.hpp"

namespace v2x {

/// Every knob of a run. Serialises to flat `key = value` text; the FNV-1a
/// hash of the canonical form identifies the run in all outputs.
struct SimConfig {
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::no_cc;
  Subframe duration_ms = 100'000;
  Subframe warmup_ms = 2'000;

  int bandwidth_mhz = 10;
  int subchannel_size_rb = 10;
  int mcs_index = 5;
  int payload_bytes = 190;

  ChannelConfig channel;
  SpsConfig sps;
  CongestionConfig congestion;
  OneShotConfig oneshot;
  ScenarioConfig scenario;
  MetricsConfig metrics;

  /// Validates everything, including grid feasibility. Throws ConfigError.
  void validate() const;
  GridConfig grid() const;
  MetricsConfig metrics_config() const;

  /// Sets one key from its text form. Throws ConfigError on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  /// Canonical (key, value) pairs in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  std::string serialize() const;
  std::uint64_t hash() const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys are errors.
SimConfig parse_config(std::string_view text, SimConfig base = {});
SimConfig load_config(const std::filesystem::path& path);

/// "low", "heavy" or a number, in vehicles per 100 m.
double parse_density(std::string_view text);

/// The reduced-scale setup used by the acceptance suite: a 1200 m ring,
/// 2 s warmup plus 30 s measured.
SimConfig desk_scale_config(double density, Scheme scheme, std::uint64_t seed, int bandwidth_mhz = 10);

}  // namespace v2x
