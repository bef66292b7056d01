#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "v2x/config.hpp"
#include "v2x/event_log.hpp"
#include "v2x/metrics.hpp"

namespace v2x {

/// Run-wide tallies kept alongside the metrics.
struct RunCounters {
  std::uint64_t transmissions = 0;
  std::uint64_t oneshot_transmissions = 0;
  std::uint64_t reselections = 0;
  std::uint64_t control_updates = 0;
  /// Updates where the vehicle sat at the minimum ITT and maximum power.
  std::uint64_t dormant_updates = 0;
  double min_tx_power_dbm = 0.0;
  double max_tx_power_dbm = 0.0;
  int max_itt_ms = 0;
  /// Lowest candidates / placements ratio seen over all completed selections.
  double min_candidate_ratio = 1.0;
};

/// Initial placement drawn from the placement stream of `cfg.seed`.
std::vector<VuePose> initial_poses(const SimConfig& cfg);

/// Discrete-event loop over 1 ms subframes. Each subframe: (1) move vehicles,
/// (2) run due resource selections, (3) transmit, (4) resolve every receiver
/// and update its sensing history and CBR counts, (5) close CBR intervals
/// and apply congestion control at their boundaries. Vehicles are always
/// processed in id order.
class Simulation {
 public:
  explicit Simulation(const SimConfig& cfg);
  Simulation(const SimConfig& cfg, std::vector<VuePose> poses);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Fixes a vehicle's periodic template before the run starts: first
  /// transmission at `first_tx` on `subchannel`, repeating every ITT.
  void pin_template(VueId vue, Subframe first_tx, int subchannel);

  void set_event_log(EventLogWriter* log);
  /// Sees every outcome at idle receivers, failed ones included.
  void set_reception_observer(std::function<void(const ReceptionOutcome&)> f);
  /// Called for every transmission; `oneshot` marks diverted ones.
  void set_transmission_observer(std::function<void(const TransmissionEvent&, bool oneshot)> f);

  void step();
  /// Steps until the configured duration.
  void run();

  Subframe now() const;
  std::size_t vehicle_count() const;
  const SimConfig& config() const;
  const GridConfig& grid() const;
  const std::vector<VuePose>& initial() const;
  const std::vector<VuePose>& poses() const;
  const MetricsCollector& metrics() const;
  const RunCounters& counters() const;
  const CongestionState& congestion(VueId vue) const;
  RunMetadata metadata() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::filesystem::path> event_log;
};

struct RunResult {
  RunMetadata meta;
  MetricsCollector metrics;
  RunCounters counters;
};

/// Validates, runs to completion and, if asked, writes the output files and event log.
RunResult run_simulation(const SimConfig& cfg, const RunOptions& options = {});

}  // namespace v2x
