#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "v2x/config.hpp"
#include "v2x/simulation.hpp"

namespace v2x {

/// One sweep axis: a config key (scheme, density, bandwidth or seed) and its values.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Parses "key=v1,v2,...". Throws ConfigError on an unknown axis or empty list.
SweepAxis parse_axis(std::string_view text);

struct SweepRun {
  SimConfig config;
  std::string scheme;
  std::string density;
  int bandwidth_mhz = 10;
  std::uint64_t seed = 0;
  /// Run directory name under the sweep output directory.
  std::string name;
};

/// Cross product of the axes over `base`, in axis order (the last axis varies
/// fastest). Throws ConfigError when two runs would write the same directory.
std::vector<SweepRun> expand_sweep(const SimConfig& base, const std::vector<SweepAxis>& axes);

struct SweepOutcome {
  std::vector<SweepRun> runs;
  std::vector<RunResult> results;
};

/// Runs every configuration on up to `jobs` threads, writes each run's files
/// to `out_dir/<name>/` and the combined tables to `out_dir`.
SweepOutcome run_sweep(const std::vector<SweepRun>& runs, const std::filesystem::path& out_dir, int jobs);

/// combined_prr.csv: one row per (scheme, density, bandwidth, bin) with the
/// mean, min and max PRR over the seeds of that cell.
void write_combined_prr(std::ostream& os, const SweepOutcome& sweep);
/// combined_ia.csv: per cell and IA bin, CCDF mean/min/max on a lattice common
/// to all seeds of the cell.
void write_combined_ia(std::ostream& os, const SweepOutcome& sweep);

}  // namespace v2x
