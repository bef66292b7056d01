#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "v2x/resource_grid.hpp"
#include "v2x/rng.hpp"
#include "v2x/types.hpp"

namespace v2x {

struct SpsConfig {
  int sensing_window_ms = 1000;
  /// Selection window is [now + t1_ms, now + t2_ms], inclusive.
  int t1_ms = 4;
  int t2_ms = 100;
  double rsrp_threshold_dbm = -128.0;
  double rsrp_step_db = 3.0;
  double min_candidate_ratio = 0.2;
  double keep_probability = 0.8;
  int reselection_min = 5;
  int reselection_max = 15;
  /// Own transmit subframes are projected forward at multiples of this period.
  int unmeasurable_period_ms = 100;

  void validate() const;
};

/// Reservation learned from a decoded SCI.
struct SciRecord {
  VueId source = 0;
  Subframe subframe = 0;
  int subchannel_start = 0;
  int subchannel_count = 1;
  int rri_ms = 100;
  double rsrp_dbm = 0.0;
};

/// Per-VUE rolling record of the trailing sensing window: the subframes the
/// owner could not sense and the most recent reservation-bearing SCI decoded
/// from each neighbour. Entries older than the window are ignored and pruned.
class SensingHistory {
 public:
  explicit SensingHistory(Subframe start = 0, int window_ms = 1000);

  void mark_unmeasurable(Subframe t);
  /// SCIs advertising RRI 0 reserve nothing and are not kept.
  void record_sci(const SciRecord& sci);
  void prune(Subframe now);

  /// True once a complete window of observations precedes `now`.
  bool full(Subframe now) const { return now - start_ >= window_ms_; }
  int window_ms() const { return window_ms_; }
  Subframe start() const { return start_; }

  bool in_window(Subframe t, Subframe now) const { return t >= now - window_ms_ && t < now; }

  /// Unmeasurable subframes in [now - window, now).
  std::vector<Subframe> unmeasurable(Subframe now) const;
  /// SCI records in [now - window, now), ordered by source.
  std::vector<SciRecord> scis(Subframe now) const;

  template <typename F>
  void for_each_sci(Subframe now, F&& f) const {
    for (std::size_t i = 0; i < latest_.size(); ++i) {
      const Slot& s = latest_[i];
      if (s.subframe != kEmpty && in_window(s.subframe, now)) {
        f(SciRecord{static_cast<VueId>(i), s.subframe, s.subchannel_start, s.subchannel_count, s.rri_ms,
                    s.rsrp_dbm});
      }
    }
  }

 private:
  Subframe start_;
  int window_ms_;
  std::deque<Subframe> unmeasurable_;
  // Latest reservation per source, indexed by source id.
  struct Slot {
    Subframe subframe;
    double rsrp_dbm;
    std::uint16_t rri_ms;
    std::uint8_t subchannel_start;
    std::uint8_t subchannel_count;
  };
  static constexpr Subframe kEmpty = std::numeric_limits<Subframe>::min();
  std::vector<Slot> latest_;
};

enum class ExclusionReason { reserved_above_threshold, unmeasurable };

struct CandidateSet {
  Subframe window_start = 0;
  Subframe window_end = 0;
  int total_slots = 0;
  double final_threshold_dbm = 0.0;
  int threshold_raises = 0;
  std::vector<ResourceId> candidates;
  std::vector<std::pair<ResourceId, ExclusionReason>> excluded;
};

/// Candidate placements for a `needed_subchannels`-wide packet in the
/// selection window [now + t1, min(now + t2, window_end_limit)].
///
/// A placement is excluded if a decoded SCI projects its reservation (every
/// multiple of its RRI) onto an overlapping resource with RSRP above the
/// threshold, or if its subframe is phase-aligned with a subframe the owner
/// could not sense. While fewer than min_candidate_ratio of the placements
/// survive, the threshold rises by rsrp_step_db. Once no RSRP exclusion is
/// left, unmeasurable exclusions are dropped too. Before the history holds a
/// full window every placement is a candidate.
CandidateSet build_candidates(const SensingHistory& history, Subframe now, int needed_subchannels,
                              const GridConfig& grid, const SpsConfig& cfg,
                              std::optional<Subframe> window_end_limit = std::nullopt);

/// Uniform draw over the candidates. Throws std::logic_error on an empty set.
ResourceId select_resource(const CandidateSet& candidates, Rng& rng);

struct SchedulerState {
  std::optional<ResourceId> current;
  int reselection_counter = 0;
  double keep_probability = 0.8;
  int rri_ms = 100;
  double rsrp_exclusion_threshold_dbm = -128.0;
};

enum class SpsDecision { keep, reselect };

/// Reselection counter range [min, max] at RRI 100 ms, scaled by 100 / RRI.
std::pair<int, int> reselection_counter_range(int rri_ms, const SpsConfig& cfg);
int draw_reselection_counter(int rri_ms, const SpsConfig& cfg, Rng& rng);

/// Called after each periodic transmission on the template.
SpsDecision on_transmit_opportunity(SchedulerState& state, const SpsConfig& cfg, Rng& rng);

}  // namespace v2x
