#include "v2x/sbsps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace v2x {

void SpsConfig::validate() const {
  if (sensing_window_ms <= 0) throw ConfigError("sensing_window_ms must be positive");
  if (t1_ms < 1 || t2_ms < t1_ms) throw ConfigError("selection window requires 1 <= t1_ms <= t2_ms");
  if (!(rsrp_step_db > 0.0)) throw ConfigError("rsrp_step_db must be positive");
  if (min_candidate_ratio < 0.0 || min_candidate_ratio > 1.0) {
    throw ConfigError("min_candidate_ratio must lie in [0, 1]");
  }
  if (keep_probability < 0.0 || keep_probability > 1.0) {
    throw ConfigError("keep_probability must lie in [0, 1]");
  }
  if (reselection_min < 1 || reselection_max < reselection_min) {
    throw ConfigError("reselection counter range must satisfy 1 <= min <= max");
  }
  if (unmeasurable_period_ms <= 0) throw ConfigError("unmeasurable_period_ms must be positive");
}

SensingHistory::SensingHistory(Subframe start, int window_ms) : start_(start), window_ms_(window_ms) {}

void SensingHistory::mark_unmeasurable(Subframe t) {
  if (unmeasurable_.empty() || unmeasurable_.back() != t) unmeasurable_.push_back(t);
}

void SensingHistory::record_sci(const SciRecord& sci) {
  if (sci.rri_ms <= 0) return;
  if (sci.rri_ms > 0xffff || sci.subchannel_start < 0 || sci.subchannel_start > 0xff ||
      sci.subchannel_count < 1 || sci.subchannel_count > 0xff) {
    throw std::out_of_range("record_sci: reservation fields out of range");
  }
  if (sci.source >= latest_.size()) latest_.resize(sci.source + 1, Slot{kEmpty, 0.0, 0, 0, 0});
  latest_[sci.source] = Slot{sci.subframe, sci.rsrp_dbm, static_cast<std::uint16_t>(sci.rri_ms),
                             static_cast<std::uint8_t>(sci.subchannel_start),
                             static_cast<std::uint8_t>(sci.subchannel_count)};
}

void SensingHistory::prune(Subframe now) {
  while (!unmeasurable_.empty() && unmeasurable_.front() < now - window_ms_) unmeasurable_.pop_front();
  for (auto& slot : latest_) {
    if (slot.subframe < now - window_ms_) slot.subframe = kEmpty;
  }
}

std::vector<Subframe> SensingHistory::unmeasurable(Subframe now) const {
  std::vector<Subframe> out;
  for (Subframe t : unmeasurable_) {
    if (in_window(t, now)) out.push_back(t);
  }
  return out;
}

std::vector<SciRecord> SensingHistory::scis(Subframe now) const {
  std::vector<SciRecord> out;
  for_each_sci(now, [&](const SciRecord& r) { out.push_back(r); });
  return out;
}

CandidateSet build_candidates(const SensingHistory& history, Subframe now, int needed_subchannels,
                              const GridConfig& grid, const SpsConfig& cfg,
                              std::optional<Subframe> window_end_limit) {
  CandidateSet set;
  set.window_start = now + cfg.t1_ms;
  set.window_end = now + cfg.t2_ms;
  if (window_end_limit) set.window_end = std::min(set.window_end, *window_end_limit);
  set.final_threshold_dbm = cfg.rsrp_threshold_dbm;
  const int per_subframe = grid.subchannels_per_subframe - needed_subchannels + 1;
  if (set.window_end < set.window_start || per_subframe <= 0) return set;

  const auto subframes = static_cast<std::size_t>(set.window_end - set.window_start + 1);
  const std::size_t total = subframes * static_cast<std::size_t>(per_subframe);
  set.total_slots = static_cast<int>(total);
  auto slot_at = [&](std::size_t i) {
    return ResourceId{set.window_start + static_cast<Subframe>(i / per_subframe),
                      static_cast<int>(i % per_subframe)};
  };

  if (!history.full(now)) {
    set.candidates.reserve(total);
    for (std::size_t i = 0; i < total; ++i) set.candidates.push_back(slot_at(i));
    return set;
  }

  // Strongest projected reservation per placement, and unmeasurable subframes.
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  std::vector<double> strongest(total, kNone);
  std::vector<char> unmeasurable(subframes, 0);

  for (Subframe m : history.unmeasurable(now)) {
    const Subframe p = cfg.unmeasurable_period_ms;
    Subframe y = m + p * ((set.window_start - m + p - 1) / p);
    if (y <= m) y += p;
    for (; y <= set.window_end; y += p) unmeasurable[static_cast<std::size_t>(y - set.window_start)] = 1;
  }

  history.for_each_sci(now, [&](const SciRecord& r) {
    const Subframe p = r.rri_ms;
    Subframe y = r.subframe + p * std::max<Subframe>(1, (set.window_start - r.subframe + p - 1) / p);
    const int first = std::max(0, r.subchannel_start - needed_subchannels + 1);
    const int last = std::min(per_subframe - 1, r.subchannel_start + r.subchannel_count - 1);
    for (; y <= set.window_end; y += p) {
      const std::size_t row = static_cast<std::size_t>(y - set.window_start) * per_subframe;
      for (int s = first; s <= last; ++s) {
        double& v = strongest[row + static_cast<std::size_t>(s)];
        v = std::max(v, r.rsrp_dbm);
      }
    }
  });

  const double highest = *std::max_element(strongest.begin(), strongest.end());
  auto required = [&](std::size_t count) {
    return static_cast<double>(count) >= cfg.min_candidate_ratio * static_cast<double>(total);
  };
  auto count_at = [&](double threshold, bool honour_unmeasurable) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < total; ++i) {
      if (honour_unmeasurable && unmeasurable[i / per_subframe]) continue;
      if (strongest[i] > threshold) continue;
      ++c;
    }
    return c;
  };

  double threshold = cfg.rsrp_threshold_dbm;
  bool honour_unmeasurable = true;
  while (!required(count_at(threshold, honour_unmeasurable))) {
    if (highest <= threshold) {
      honour_unmeasurable = false;
      break;
    }
    threshold += cfg.rsrp_step_db;
    ++set.threshold_raises;
  }
  set.final_threshold_dbm = threshold;

  for (std::size_t i = 0; i < total; ++i) {
    const ResourceId id = slot_at(i);
    if (honour_unmeasurable && unmeasurable[i / per_subframe]) {
      set.excluded.emplace_back(id, ExclusionReason::unmeasurable);
    } else if (strongest[i] > threshold) {
      set.excluded.emplace_back(id, ExclusionReason::reserved_above_threshold);
    } else {
      set.candidates.push_back(id);
    }
  }
  return set;
}

ResourceId select_resource(const CandidateSet& candidates, Rng& rng) {
  if (candidates.candidates.empty()) throw std::logic_error("select_resource: empty candidate set");
  const auto n = static_cast<int>(candidates.candidates.size());
  return candidates.candidates[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
}

std::pair<int, int> reselection_counter_range(int rri_ms, const SpsConfig& cfg) {
  if (rri_ms == 100) return {cfg.reselection_min, cfg.reselection_max};
  const double scale = 100.0 / rri_ms;
  const int lo = std::max(1, static_cast<int>(std::lround(cfg.reselection_min * scale)));
  const int hi = std::max(lo, static_cast<int>(std::lround(cfg.reselection_max * scale)));
  return {lo, hi};
}

int draw_reselection_counter(int rri_ms, const SpsConfig& cfg, Rng& rng) {
  const auto [lo, hi] = reselection_counter_range(rri_ms, cfg);
  return uniform_int(rng, lo, hi);
}

SpsDecision on_transmit_opportunity(SchedulerState& state, const SpsConfig& cfg, Rng& rng) {
  if (state.reselection_counter > 0) --state.reselection_counter;
  if (state.reselection_counter > 0) return SpsDecision::keep;
  if (uniform_real(rng) < state.keep_probability) {
    state.reselection_counter = draw_reselection_counter(state.rri_ms, cfg, rng);
    return SpsDecision::keep;
  }
  return SpsDecision::reselect;
}

}  // namespace v2x
