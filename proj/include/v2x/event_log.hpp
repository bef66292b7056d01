#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "v2x/config.hpp"
#include "v2x/metrics.hpp"
#include "v2x/phy_channel.hpp"
#include "v2x/scenario.hpp"

namespace v2x {

/// Append-only text log of a run, sufficient to rebuild every metrics file:
///
///   # v2x-event-log 1
///   @key = value                       configuration, canonical order
///   P,id,lane,longitudinal_m,direction initial poses
///   T,subframe,packet_id,tx,subchannel_start,subchannel_count,tx_power_dbm,rri_ms
///   R,subframe,packet_id,tx,rx,sinr_db  successful receptions
///   C,time_ms,mean_cbr
///   K,time_ms,updates,mean_itt_ms,min_itt_ms,max_itt_ms,mean_dbm,min_dbm,max_dbm
///
/// Records are ordered by subframe. Reals are written with round-trip precision.
class EventLogWriter {
 public:
  explicit EventLogWriter(std::ostream& os) : os_(os) {}

  void header(const SimConfig& cfg, std::span<const VuePose> initial_poses);
  void tx(const TransmissionEvent& e);
  void rx(const ReceptionOutcome& o);
  void cbr(Subframe time_ms, double mean_cbr);
  void control(const ControlSample& s);

 private:
  std::ostream& os_;
};

/// Folds a saved log through the metrics accumulators and writes the same
/// files a live run writes.
void replay(std::istream& log, const std::filesystem::path& out_dir);
void replay_file(const std::filesystem::path& log, const std::filesystem::path& out_dir);

}  // namespace v2x
