#include "v2x/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <type_traits>
#include <sstream>

namespace v2x {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const std::string s(v);
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw ConfigError("invalid number for " + std::string(key) + ": '" + s + "'");
  }
  return out;
}

template <typename T>
T to_int(std::string_view key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid integer for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("invalid boolean for " + std::string(key) + ": '" + std::string(v) + "'");
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(SimConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

#define V2X_REAL(path)                                                                   \
  Field {                                                                                \
    [](SimConfig& c, std::string_view k, std::string_view v) { c.path = to_double(k, v); }, \
        [](const SimConfig& c) { return num(c.path); }                                   \
  }
#define V2X_INT(path)                                                                    \
  Field {                                                                                \
    [](SimConfig& c, std::string_view k, std::string_view v) {                           \
      c.path = to_int<std::remove_cvref_t<decltype(c.path)>>(k, v);                      \
    },                                                                                   \
        [](const SimConfig& c) { return std::to_string(c.path); }                        \
  }
#define V2X_BOOL(path)                                                                   \
  Field {                                                                                \
    [](SimConfig& c, std::string_view k, std::string_view v) { c.path = to_bool(k, v); }, \
        [](const SimConfig& c) { return std::string(c.path ? "true" : "false"); }        \
  }

// Order defines the canonical serialisation.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"seed", V2X_INT(seed)},
      {"scheme",
       {[](SimConfig& c, std::string_view, std::string_view v) { c.scheme = parse_scheme(v); },
        [](const SimConfig& c) { return std::string(to_string(c.scheme)); }}},
      {"duration_ms", V2X_INT(duration_ms)},
      {"warmup_ms", V2X_INT(warmup_ms)},
      {"bandwidth_mhz", V2X_INT(bandwidth_mhz)},
      {"subchannel_size_rb", V2X_INT(subchannel_size_rb)},
      {"mcs_index", V2X_INT(mcs_index)},
      {"payload_bytes", V2X_INT(payload_bytes)},
      {"pl0_db", V2X_REAL(channel.pl0_db)},
      {"exponent_near", V2X_REAL(channel.exponent_near)},
      {"exponent_far", V2X_REAL(channel.exponent_far)},
      {"breakpoint_m", V2X_REAL(channel.breakpoint_m)},
      {"shadowing_sigma_db", V2X_REAL(channel.shadowing_sigma_db)},
      {"shadowing_decorrelation_m", V2X_REAL(channel.shadowing_decorrelation_m)},
      {"noise_figure_db", V2X_REAL(channel.noise_figure_db)},
      {"thermal_noise_dbm_hz", V2X_REAL(channel.thermal_noise_density_dbm_hz)},
      {"carrier_frequency_ghz", V2X_REAL(channel.carrier_frequency_ghz)},
      {"antenna_height_m", V2X_REAL(channel.antenna_height_m)},
      {"sensitivity_dbm", V2X_REAL(channel.sensitivity_dbm)},
      {"sinr_threshold_db", V2X_REAL(channel.sinr_threshold_db)},
      {"sensing_window_ms", V2X_INT(sps.sensing_window_ms)},
      {"t1_ms", V2X_INT(sps.t1_ms)},
      {"t2_ms", V2X_INT(sps.t2_ms)},
      {"rsrp_threshold_dbm", V2X_REAL(sps.rsrp_threshold_dbm)},
      {"rsrp_step_db", V2X_REAL(sps.rsrp_step_db)},
      {"min_candidate_ratio", V2X_REAL(sps.min_candidate_ratio)},
      {"keep_probability", V2X_REAL(sps.keep_probability)},
      {"reselection_min", V2X_INT(sps.reselection_min)},
      {"reselection_max", V2X_INT(sps.reselection_max)},
      {"unmeasurable_period_ms", V2X_INT(sps.unmeasurable_period_ms)},
      {"cbr_threshold_dbm", V2X_REAL(congestion.cbr_threshold_dbm)},
      {"cbr_interval_ms", V2X_INT(congestion.cbr_interval_ms)},
      {"control_period_ms", V2X_INT(congestion.control_period_ms)},
      {"density_radius_m", V2X_REAL(congestion.density_radius_m)},
      {"density_source",
       {[](SimConfig& c, std::string_view k, std::string_view v) {
          if (v == "reception") {
            c.congestion.density_source = DensitySource::reception;
          } else if (v == "ground_truth") {
            c.congestion.density_source = DensitySource::ground_truth;
          } else {
            throw ConfigError("invalid " + std::string(k) + ": '" + std::string(v) +
                              "' (reception | ground_truth)");
          }
        },
        [](const SimConfig& c) {
          return std::string(c.congestion.density_source == DensitySource::reception ? "reception"
                                                                                     : "ground_truth");
        }}},
      {"rate_activation_density", V2X_REAL(congestion.rate_activation_density)},
      {"itt_filter_coefficient", V2X_REAL(congestion.itt_filter_coefficient)},
      {"itt_min_ms", V2X_INT(congestion.itt_min_ms)},
      {"itt_max_ms", V2X_INT(congestion.itt_max_ms)},
      {"power_max_dbm", V2X_REAL(congestion.power_max_dbm)},
      {"power_min_dbm", V2X_REAL(congestion.power_min_dbm)},
      {"cbr_knee_low", V2X_REAL(congestion.cbr_knee_low)},
      {"cbr_knee_high", V2X_REAL(congestion.cbr_knee_high)},
      {"oneshot_counter_min", V2X_INT(oneshot.counter_min)},
      {"oneshot_counter_max", V2X_INT(oneshot.counter_max)},
      {"road_length_m", V2X_REAL(scenario.road_length_m)},
      {"lanes", V2X_INT(scenario.lanes)},
      {"lane_width_m", V2X_REAL(scenario.lane_width_m)},
      {"speed_mps", V2X_REAL(scenario.speed_mps)},
      {"density",
       {[](SimConfig& c, std::string_view, std::string_view v) {
          c.scenario.density_veh_per_100m = parse_density(v);
        },
        [](const SimConfig& c) { return num(c.scenario.density_veh_per_100m); }}},
      {"min_headway_m", V2X_REAL(scenario.min_headway_m)},
      {"wraparound", V2X_BOOL(scenario.wraparound)},
      {"prr_bin_m", V2X_REAL(metrics.bin_width_m)},
      {"prr_max_range_m", V2X_REAL(metrics.max_range_m)},
      {"ia_lattice_ms", V2X_INT(metrics.ia_lattice_ms)},
  };
  return table;
}

#undef V2X_REAL
#undef V2X_INT
#undef V2X_BOOL

}  // namespace

double parse_density(std::string_view text) {
  if (text == "low") return kLowDensity;
  if (text == "heavy") return kHeavyDensity;
  return to_double("density", text);
}

void SimConfig::set(std::string_view key, std::string_view value) {
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      field.set(*this, key, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> SimConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, field] : fields()) out.emplace_back(name, field.get(*this));
  return out;
}

std::string SimConfig::serialize() const {
  std::string s;
  for (const auto& [k, v] : entries()) s += k + " = " + v + "\n";
  return s;
}

std::uint64_t SimConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

GridConfig SimConfig::grid() const {
  return make_grid(bandwidth_mhz, subchannel_size_rb, mcs_index, payload_bytes);
}

MetricsConfig SimConfig::metrics_config() const {
  MetricsConfig m = metrics;
  m.warmup_ms = warmup_ms;
  return m;
}

void SimConfig::validate() const {
  if (duration_ms < 0) throw ConfigError("duration_ms must be >= 0");
  if (warmup_ms < 0) throw ConfigError("warmup_ms must be >= 0");
  (void)grid();
  channel.validate();
  sps.validate();
  congestion.validate();
  oneshot.validate();
  scenario.validate();
  if (!(metrics.bin_width_m > 0.0) || !(metrics.max_range_m > 0.0)) {
    throw ConfigError("PRR bins require positive width and range");
  }
  if (metrics.ia_lattice_ms <= 0) throw ConfigError("ia_lattice_ms must be positive");
}

SimConfig parse_config(std::string_view text, SimConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
  return base;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

SimConfig desk_scale_config(double density, Scheme scheme, std::uint64_t seed, int bandwidth_mhz) {
  SimConfig c;
  c.seed = seed;
  c.scheme = scheme;
  c.bandwidth_mhz = bandwidth_mhz;
  c.scenario.road_length_m = 1200.0;
  c.scenario.density_veh_per_100m = density;
  c.warmup_ms = 2'000;
  c.duration_ms = 32'000;
  return c;
}

}  // namespace v2x
