#include "v2x/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace v2x {

int ScenarioConfig::vehicle_count() const {
  return static_cast<int>(std::lround(density_veh_per_100m * road_length_m / 100.0));
}

void ScenarioConfig::validate() const {
  if (!(road_length_m > 0.0)) throw ConfigError("road_length_m must be positive");
  if (lanes < 1) throw ConfigError("lanes must be >= 1");
  if (!(density_veh_per_100m > 0.0)) throw ConfigError("density must be positive");
  if (speed_mps < 0.0) throw ConfigError("speed_mps must be >= 0");
  if (min_headway_m < 0.0) throw ConfigError("min_headway_m must be >= 0");
  const int n = vehicle_count();
  if (n < 1) throw ConfigError("density yields zero vehicles");
  const int per_lane = (n + lanes - 1) / lanes;
  if (per_lane * min_headway_m > road_length_m) {
    throw ConfigError("density " + std::to_string(density_veh_per_100m) + " veh/100m cannot keep a " +
                      std::to_string(min_headway_m) + " m headway on " + std::to_string(lanes) +
                      " lanes of " + std::to_string(road_length_m) + " m");
  }
}

int lane_direction(int lane, const ScenarioConfig& cfg) {
  return lane < std::max(1, cfg.lanes / 2) ? 1 : -1;
}

std::vector<VuePose> spawn(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  const int total = cfg.vehicle_count();
  std::vector<VuePose> out;
  out.reserve(static_cast<std::size_t>(total));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int lane = 0; lane < cfg.lanes; ++lane) {
    const int k = total / cfg.lanes + (lane < total % cfg.lanes ? 1 : 0);
    if (k == 0) continue;
    // k sorted uniforms on the slack, then spread by the headway.
    const double slack = cfg.road_length_m - k * cfg.min_headway_m;
    std::vector<double> xs(static_cast<std::size_t>(k));
    for (auto& x : xs) x = u(rng) * slack;
    std::sort(xs.begin(), xs.end());
    for (int i = 0; i < k; ++i) {
      VuePose p;
      p.id = static_cast<VueId>(out.size());
      p.lane = lane;
      p.longitudinal_m = xs[static_cast<std::size_t>(i)] + i * cfg.min_headway_m;
      p.direction = lane_direction(lane, cfg);
      out.push_back(p);
    }
  }
  return out;
}

VuePose pose_at(const VuePose& initial, Subframe t_ms, const ScenarioConfig& cfg) {
  VuePose p = initial;
  const double moved = initial.direction * cfg.speed_mps * static_cast<double>(t_ms) / 1000.0;
  double x = std::fmod(initial.longitudinal_m + moved, cfg.road_length_m);
  if (x < 0.0) x += cfg.road_length_m;
  if (x >= cfg.road_length_m) x -= cfg.road_length_m;
  p.longitudinal_m = x;
  return p;
}

std::vector<VuePose> advance(std::span<const VuePose> poses, Subframe dt_ms, const ScenarioConfig& cfg) {
  std::vector<VuePose> out;
  out.reserve(poses.size());
  for (const auto& p : poses) out.push_back(pose_at(p, dt_ms, cfg));
  return out;
}

double distance_m(const VuePose& a, const VuePose& b, const ScenarioConfig& cfg) {
  double dx = std::abs(a.longitudinal_m - b.longitudinal_m);
  if (cfg.wraparound) dx = std::min(dx, cfg.road_length_m - dx);
  const double dy = (a.lane - b.lane) * cfg.lane_width_m;
  return std::sqrt(dx * dx + dy * dy);
}

double relative_displacement_m(const VuePose& a, const VuePose& b, Subframe t_ms,
                               const ScenarioConfig& cfg) {
  return std::abs(a.direction - b.direction) * cfg.speed_mps * static_cast<double>(t_ms) / 1000.0;
}

}  // namespace v2x
