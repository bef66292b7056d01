#pragma once

#include <span>
#include <vector>

#include "v2x/rng.hpp"
#include "v2x/types.hpp"

namespace v2x {

struct ScenarioConfig {
  double road_length_m = 4800.0;
  int lanes = 6;
  double lane_width_m = 4.0;
  double speed_mps = 30.0;
  double density_veh_per_100m = 13.2;
  double min_headway_m = 5.0;
  /// Ring road; distances are measured on the ring. When false, vehicles
  /// still wrap (the count stays constant) but distances are linear.
  bool wraparound = true;

  int vehicle_count() const;
  void validate() const;
};

inline constexpr double kLowDensity = 13.2;
inline constexpr double kHeavyDensity = 83.2;

struct VuePose {
  VueId id = 0;
  int lane = 0;
  double longitudinal_m = 0.0;
  int direction = 1;
};

/// Lanes [0, lanes/2) drive in +x, the rest in -x.
int lane_direction(int lane, const ScenarioConfig& cfg);

/// Per-lane uniform placement with minimum headway. Ids are assigned lane by
/// lane in increasing position.
std::vector<VuePose> spawn(const ScenarioConfig& cfg, Rng& rng);

std::vector<VuePose> advance(std::span<const VuePose> poses, Subframe dt_ms, const ScenarioConfig& cfg);

/// Closed-form position of a vehicle `t_ms` after `initial`.
VuePose pose_at(const VuePose& initial, Subframe t_ms, const ScenarioConfig& cfg);

/// Euclidean distance including the lateral lane offset; longitudinal
/// separation is taken on the ring when wraparound is on.
double distance_m(const VuePose& a, const VuePose& b, const ScenarioConfig& cfg);

/// Relative displacement accumulated by a pair over `t_ms` at constant speed.
double relative_displacement_m(const VuePose& a, const VuePose& b, Subframe t_ms,
                               const ScenarioConfig& cfg);

}  // namespace v2x
