#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "v2x/config.hpp"
#include "v2x/event_log.hpp"
#include "v2x/plot.hpp"
#include "v2x/simulation.hpp"
#include "v2x/sweep.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scheme;
  std::optional<std::string> density;
  std::optional<int> bandwidth;
  std::optional<double> duration_s;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--scheme", o.scheme, "no_cc | cc | rc_only | oneshot_rc");
  cmd->add_option("--density", o.density, "low | heavy | vehicles per 100 m");
  cmd->add_option("--bandwidth", o.bandwidth, "channel bandwidth in MHz (10 or 20)");
  cmd->add_option("--duration", o.duration_s, "simulated time in seconds, warmup included");
}

v2x::SimConfig resolve(const Overrides& o) {
  v2x::SimConfig cfg = o.config.empty() ? v2x::SimConfig{} : v2x::load_config(o.config);
  if (o.seed) cfg.set("seed", std::to_string(*o.seed));
  if (o.scheme) cfg.set("scheme", *o.scheme);
  if (o.density) cfg.set("density", *o.density);
  if (o.bandwidth) cfg.set("bandwidth_mhz", std::to_string(*o.bandwidth));
  if (o.duration_s) {
    if (*o.duration_s < 0) throw v2x::ConfigError("duration must be non-negative");
    cfg.duration_ms = static_cast<v2x::Subframe>(std::llround(*o.duration_s * 1000.0));
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LTE-V2X Mode-4 sidelink simulator"};
  app.require_subcommand(1);

  Overrides run_opt;
  std::string run_out = "out";
  bool save_events = false;
  auto* run = app.add_subcommand("run", "run one simulation");
  add_overrides(run, run_opt);
  run->add_option("--out", run_out, "output directory");
  run->add_flag("--save-events", save_events, "also write events.log for replay");

  Overrides sweep_opt;
  std::vector<std::string> axes;
  int jobs = 1;
  std::string sweep_out = "sweep";
  auto* sweep = app.add_subcommand("sweep", "run the cross product of the given axes");
  add_overrides(sweep, sweep_opt);
  sweep->add_option("--axis", axes, "key=v1,v2,... with key in scheme, density, bandwidth, seed")->required();
  sweep->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "output directory");

  std::string events;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "rebuild the metrics files from an event log");
  replay->add_option("--events", events, "event log")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "output directory")->required();

  std::string plot_in;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "render SVG charts from a run directory");
  plot->add_option("--in", plot_in, "run directory")->required()->check(CLI::ExistingDirectory);
  plot->add_option("--out", plot_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const v2x::SimConfig cfg = resolve(run_opt);
      v2x::RunOptions opt;
      opt.out_dir = fs::path(run_out);
      if (save_events) opt.event_log = fs::path(run_out) / "events.log";
      const auto result = v2x::run_simulation(cfg, opt);
      std::printf("%zu vehicles, %llu transmissions, config %s -> %s\n", result.meta.vehicle_count,
                  static_cast<unsigned long long>(result.counters.transmissions),
                  v2x::hash_hex(result.meta.config_hash).c_str(), run_out.c_str());
    } else if (*sweep) {
      const v2x::SimConfig base = resolve(sweep_opt);
      std::vector<v2x::SweepAxis> parsed;
      for (const auto& a : axes) parsed.push_back(v2x::parse_axis(a));
      const auto runs = v2x::expand_sweep(base, parsed);
      v2x::run_sweep(runs, sweep_out, jobs);
      std::printf("%zu runs -> %s\n", runs.size(), sweep_out.c_str());
    } else if (*replay) {
      v2x::replay_file(events, replay_out);
    } else if (*plot) {
      v2x::plot_run(plot_in, plot_out);
    }
  } catch (const v2x::ConfigError& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
