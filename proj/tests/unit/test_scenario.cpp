#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "v2x/scenario.hpp"

using namespace v2x;

TEST_CASE("vehicle counts for the presets") {
  ScenarioConfig cfg;
  cfg.density_veh_per_100m = kLowDensity;
  CHECK(cfg.vehicle_count() == 634);
  cfg.density_veh_per_100m = kHeavyDensity;
  CHECK(cfg.vehicle_count() == 3994);
  cfg.road_length_m = 1200.0;
  CHECK(cfg.vehicle_count() == 998);
}

TEST_CASE("spawn honours lanes, headway and direction") {
  ScenarioConfig cfg;
  cfg.density_veh_per_100m = kHeavyDensity;
  Rng rng(11);
  const auto poses = spawn(cfg, rng);
  REQUIRE(poses.size() == 3994);
  std::map<int, std::vector<double>> lanes;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    CHECK(poses[i].id == i);
    CHECK(poses[i].longitudinal_m >= 0.0);
    CHECK(poses[i].longitudinal_m < cfg.road_length_m);
    CHECK(poses[i].direction == (poses[i].lane < 3 ? 1 : -1));
    lanes[poses[i].lane].push_back(poses[i].longitudinal_m);
  }
  CHECK(lanes.size() == 6);
  for (auto& [lane, xs] : lanes) {
    CHECK(xs.size() >= 665);
    CHECK(xs.size() <= 666);
    CHECK(std::is_sorted(xs.begin(), xs.end()));
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] - xs[i - 1] >= cfg.min_headway_m - 1e-9);
    CHECK(xs.front() + cfg.road_length_m - xs.back() >= cfg.min_headway_m - 1e-9);
  }
}

TEST_CASE("a single vehicle") {
  ScenarioConfig cfg;
  cfg.density_veh_per_100m = 0.021;
  Rng rng(1);
  CHECK(spawn(cfg, rng).size() == 1);
}

TEST_CASE("infeasible headway is a configuration error") {
  ScenarioConfig cfg;
  cfg.density_veh_per_100m = 200.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  Rng rng(1);
  CHECK_THROWS_AS(spawn(cfg, rng), ConfigError);
  cfg.density_veh_per_100m = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("advance") {
  const ScenarioConfig cfg;
  const VuePose a{0, 0, 100.0, 1};
  CHECK(pose_at(a, 1000, cfg).longitudinal_m == doctest::Approx(130.0));
  const VuePose b{1, 0, 4799.0, 1};
  CHECK(pose_at(b, 100, cfg).longitudinal_m == doctest::Approx(2.0));
  const VuePose c{2, 4, 10.0, -1};
  CHECK(pose_at(c, 1000, cfg).longitudinal_m == doctest::Approx(4780.0));
  const VuePose d{3, 1, 0.0, 1};
  CHECK(pose_at(d, 100000, cfg).longitudinal_m == doctest::Approx(3000.0));

  const std::vector<VuePose> many{a, b, c, d};
  const auto moved = advance(many, 250, cfg);
  REQUIRE(moved.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(moved[i].longitudinal_m == pose_at(many[i], 250, cfg).longitudinal_m);
}

TEST_CASE("ring distance is symmetric and continuous across the seam") {
  const ScenarioConfig cfg;
  const VuePose fixed{0, 0, 4790.0, 1};
  double prev = -1.0;
  for (double x = 4780.0; x < 4800.0 + 20.0; x += 0.5) {
    const VuePose p{1, 0, std::fmod(x, 4800.0), 1};
    const double d = distance_m(fixed, p, cfg);
    CHECK(d == distance_m(p, fixed, cfg));
    CHECK(d == doctest::Approx(std::abs(x - 4790.0)).epsilon(1e-9));
    if (prev >= 0.0) CHECK(std::abs(d - prev) <= 0.5 + 1e-9);
    prev = d;
  }
  const VuePose lat{2, 3, 4790.0, -1};
  CHECK(distance_m(fixed, lat, cfg) == doctest::Approx(12.0));

  ScenarioConfig line = cfg;
  line.wraparound = false;
  const VuePose e{3, 0, 5.0, 1};
  CHECK(distance_m(fixed, e, line) == doctest::Approx(4785.0));
  CHECK(distance_m(fixed, e, cfg) == doctest::Approx(15.0));
}

TEST_CASE("relative displacement") {
  const ScenarioConfig cfg;
  const VuePose east{0, 0, 0.0, 1};
  const VuePose west{1, 5, 0.0, -1};
  CHECK(relative_displacement_m(east, east, 5000, cfg) == 0.0);
  CHECK(relative_displacement_m(east, west, 1000, cfg) == doctest::Approx(60.0));
}
