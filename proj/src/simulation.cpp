#include "v2x/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "v2x/rng.hpp"

namespace v2x {

std::vector<VuePose> initial_poses(const SimConfig& cfg) {
  Rng rng = make_stream(cfg.seed, Stream::placement);
  return spawn(cfg.scenario, rng);
}

namespace {

struct PendingSelection {
  enum class Kind { reselect, oneshot } kind = Kind::reselect;
  Subframe decide_at = 0;
  std::optional<Subframe> window_end_limit;
};

struct Vue {
  SensingHistory history;
  SchedulerState sps;
  Subframe next_tx = -1;
  std::optional<PendingSelection> pending;
  std::optional<ResourceId> oneshot_slot;
  bool force_reselect = false;
  OneShotState oneshot;
  CongestionState cc;
  CbrTracker cbr;
  Rng scheduler_rng;
  Rng oneshot_rng;
  /// Last subframe each source was decoded within the density radius.
  std::vector<std::int32_t> heard_near;
};

}  // namespace

struct Simulation::Impl {
  SimConfig cfg;
  GridConfig grid;
  PhyParams phy;
  PathGain path_gain;
  std::vector<VuePose> initial;
  std::vector<VuePose> poses;
  std::vector<Vue> vues;
  ShadowingField shadowing;
  MetricsCollector metrics;
  RunCounters counters;
  Subframe now = 0;
  std::uint64_t next_packet_id = 1;
  EventLogWriter* log = nullptr;
  std::function<void(const ReceptionOutcome&)> on_rx;
  std::function<void(const TransmissionEvent&, bool)> on_tx;

  // Scratch reused across subframes.
  std::vector<TransmissionEvent> txs;
  std::vector<char> tx_is_oneshot;
  std::vector<char> transmitting;
  std::vector<double> rx_power_mw;
  std::vector<double> distances;
  std::vector<double> link_mw;
  std::vector<double> link_m;
  std::vector<ReceptionOutcome> outcomes;
  std::vector<double> rssi_mw;
  double cbr_threshold_mw = 0.0;
  double rsrp_offset_db = 0.0;

  Impl(const SimConfig& c, std::vector<VuePose> p)
      : cfg(c),
        grid(c.grid()),
        phy(PhyParams::make(grid, c.channel)),
        path_gain(c.channel),
        initial(std::move(p)),
        poses(initial),
        shadowing(hash_words(c.seed, static_cast<std::uint64_t>(Stream::shadowing)), c.channel,
                  initial.size()),
        metrics(c.metrics_config(), c.scenario, initial.size()) {
    for (std::size_t i = 0; i < initial.size(); ++i) {
      if (initial[i].id != i) throw ConfigError("vehicle ids must be dense and ordered");
    }
    phy.bler_seed = hash_words(c.seed, static_cast<std::uint64_t>(Stream::phy));
    cbr_threshold_mw = dbm_to_mw(c.congestion.cbr_threshold_dbm);
    rsrp_offset_db = 10.0 * std::log10(static_cast<double>(kSubcarriersPerRb * grid.packet_rb_count()));
    counters.min_tx_power_dbm = std::numeric_limits<double>::infinity();
    counters.max_tx_power_dbm = -std::numeric_limits<double>::infinity();

    const std::size_t n = initial.size();
    vues.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Vue v{.history = SensingHistory(0, c.sps.sensing_window_ms),
            .sps = {},
            .next_tx = -1,
            .pending = std::nullopt,
            .oneshot_slot = std::nullopt,
            .force_reselect = false,
            .oneshot = {},
            .cc = make_congestion_state(c.scheme, c.congestion),
            .cbr = CbrTracker(c.congestion.cbr_threshold_dbm),
            .scheduler_rng = make_stream(c.seed, Stream::scheduler, i),
            .oneshot_rng = make_stream(c.seed, Stream::oneshot, i),
            .heard_near = std::vector<std::int32_t>(n, std::numeric_limits<std::int32_t>::min())};
      v.sps.keep_probability = c.sps.keep_probability;
      v.sps.rri_ms = v.cc.itt_ms;
      v.sps.rsrp_exclusion_threshold_dbm = c.sps.rsrp_threshold_dbm;
      if (uses_oneshot(c.scheme)) v.oneshot = make_oneshot_state(c.oneshot, v.oneshot_rng);
      const Subframe start = uniform_int(v.scheduler_rng, 0, std::max(0, v.sps.rri_ms - 1));
      v.pending = PendingSelection{PendingSelection::Kind::reselect, start, std::nullopt};
      vues.push_back(std::move(v));
    }
    transmitting.assign(n, 0);
    distances.resize(n);
    rssi_mw.resize(static_cast<std::size_t>(grid.subchannels_per_subframe));
  }

  void schedule_reselection(Vue& v, Subframe n, int rri) {
    v.sps.current.reset();
    v.next_tx = -1;
    v.sps.rri_ms = rri;
    v.pending = PendingSelection{PendingSelection::Kind::reselect,
                                 std::max<Subframe>(n + 1, n + rri - cfg.sps.t2_ms), std::nullopt};
  }

  void schedule_oneshot(Vue& v, Subframe n) {
    v.pending = PendingSelection{PendingSelection::Kind::oneshot,
                                 std::max<Subframe>(n + 1, v.next_tx - cfg.sps.t2_ms), v.next_tx};
  }

  void note_selection(const CandidateSet& set) {
    if (set.total_slots > 0) {
      counters.min_candidate_ratio =
          std::min(counters.min_candidate_ratio,
                   static_cast<double>(set.candidates.size()) / static_cast<double>(set.total_slots));
    }
  }

  void run_selection(Vue& v, Subframe n) {
    const PendingSelection p = *v.pending;
    v.pending.reset();
    if (p.kind == PendingSelection::Kind::reselect) {
      const CandidateSet set = build_candidates(v.history, n, grid.subchannels_per_packet, grid, cfg.sps);
      note_selection(set);
      const ResourceId pick = select_resource(set, v.scheduler_rng);
      v.sps.current = pick;
      v.next_tx = pick.subframe;
      v.sps.reselection_counter = draw_reselection_counter(v.sps.rri_ms, cfg.sps, v.scheduler_rng);
      ++counters.reselections;
      return;
    }
    // One-shot: valid only while the template it was planned against still stands.
    if (!v.sps.current || !p.window_end_limit || v.next_tx != *p.window_end_limit) return;
    const CandidateSet set =
        build_candidates(v.history, n, grid.subchannels_per_packet, grid, cfg.sps, p.window_end_limit);
    if (set.candidates.empty()) return;  // diversion stays armed for the next period
    note_selection(set);
    v.oneshot_slot = select_resource(set, v.oneshot_rng);
    v.oneshot.pending_oneshot = v.oneshot_slot;
    v.next_tx += v.sps.rri_ms;  // the diverted periodic occurrence is skipped
  }

  void after_periodic_tx(Vue& v, Subframe n) {
    v.next_tx = n + v.sps.rri_ms;
    if (v.force_reselect) {
      v.force_reselect = false;
      schedule_reselection(v, n, v.cc.itt_ms);
    } else if (on_transmit_opportunity(v.sps, cfg.sps, v.scheduler_rng) == SpsDecision::reselect) {
      schedule_reselection(v, n, v.cc.itt_ms);
    }
    if (uses_oneshot(cfg.scheme)) {
      on_periodic_tx(v.oneshot, cfg.oneshot, v.oneshot_rng);
      if (v.oneshot.divert_next && !v.pending && v.sps.current) schedule_oneshot(v, n);
    }
  }

  void transmit(Subframe n) {
    txs.clear();
    tx_is_oneshot.clear();
    std::fill(transmitting.begin(), transmitting.end(), 0);
    for (std::size_t i = 0; i < vues.size(); ++i) {
      Vue& v = vues[i];
      const bool periodic = v.sps.current && v.next_tx == n;
      const bool oneshot = v.oneshot_slot && v.oneshot_slot->subframe == n;
      if (!periodic && !oneshot) continue;
      TransmissionEvent e;
      e.packet_id = next_packet_id++;
      e.tx = static_cast<VueId>(i);
      e.subframe = n;
      e.subchannel_start = oneshot ? v.oneshot_slot->subchannel : v.sps.current->subchannel;
      e.subchannel_count = grid.subchannels_per_packet;
      e.tx_power_dbm = v.cc.tx_power_dbm;
      e.rri_ms = oneshot ? 0 : v.sps.rri_ms;
      txs.push_back(e);
      tx_is_oneshot.push_back(oneshot ? 1 : 0);
      transmitting[i] = 1;
      v.history.mark_unmeasurable(n);

      ++counters.transmissions;
      counters.min_tx_power_dbm = std::min(counters.min_tx_power_dbm, e.tx_power_dbm);
      counters.max_tx_power_dbm = std::max(counters.max_tx_power_dbm, e.tx_power_dbm);
      if (oneshot) {
        ++counters.oneshot_transmissions;
        v.oneshot_slot.reset();
        take_next_action(v.oneshot);
      } else {
        after_periodic_tx(v, n);
      }
    }
    for (std::size_t k = 0; k < txs.size(); ++k) {
      if (log) log->tx(txs[k]);
      metrics.record_tx(txs[k], poses);
      if (on_tx) on_tx(txs[k], tx_is_oneshot[k] != 0);
    }
  }

  /// Received power and distance of every transmission at every idle
  /// receiver, transmitter-major.
  void compute_links(Subframe n) {
    const std::size_t count = vues.size();
    link_mw.assign(txs.size() * count, 0.0);
    link_m.assign(txs.size() * count, 0.0);
    for (std::size_t j = 0; j < txs.size(); ++j) {
      const TransmissionEvent& e = txs[j];
      const VuePose& tx_pose = poses[e.tx];
      const double p_mw = dbm_to_mw(e.tx_power_dbm);
      double* mw = &link_mw[j * count];
      double* m = &link_m[j * count];
      for (std::size_t r = 0; r < count; ++r) {
        if (transmitting[r]) continue;
        const VuePose& rx_pose = poses[r];
        const double d = distance_m(tx_pose, rx_pose, cfg.scenario);
        m[r] = d;
        mw[r] = p_mw * path_gain(d) *
                shadowing.shadow_gain(e.tx, static_cast<VueId>(r),
                                      relative_displacement_m(tx_pose, rx_pose, n, cfg.scenario));
      }
    }
  }

  void receive_all(Subframe n) {
    const std::size_t k = txs.size();
    rx_power_mw.resize(k);
    outcomes.resize(k);
    const int subchannels = grid.subchannels_per_subframe;
    const int idle_busy = phy.noise_per_subchannel_mw > cbr_threshold_mw ? subchannels : 0;
    const double radius = cfg.congestion.density_radius_m;

    compute_links(n);
    for (std::size_t r = 0; r < vues.size(); ++r) {
      Vue& v = vues[r];
      if (transmitting[r]) continue;  // half duplex: no reception, no sensing
      if (k == 0) {
        v.cbr.add_counts(idle_busy, subchannels);
        continue;
      }
      for (std::size_t j = 0; j < k; ++j) {
        rx_power_mw[j] = link_mw[j * vues.size() + r];
        distances[j] = link_m[j * vues.size() + r];
      }
      resolve_receiver(static_cast<VueId>(r), false, txs, rx_power_mw, phy, outcomes, rssi_mw);

      int busy = 0;
      for (double s : rssi_mw) busy += s > cbr_threshold_mw ? 1 : 0;
      v.cbr.add_counts(busy, subchannels);

      for (std::size_t j = 0; j < k; ++j) {
        const ReceptionOutcome& o = outcomes[j];
        if (on_rx) on_rx(o);
        if (!o.success) continue;
        const TransmissionEvent& e = txs[j];
        v.history.record_sci({e.tx, n, e.subchannel_start, e.subchannel_count, e.rri_ms,
                              o.rx_power_dbm - rsrp_offset_db});
        if (distances[j] <= radius) v.heard_near[e.tx] = static_cast<std::int32_t>(n);
        metrics.record_rx(o, poses, n);
        if (log) log->rx(o);
      }
    }
  }

  void close_cbr_interval(Subframe t) {
    double sum = 0.0;
    for (auto& v : vues) sum += v.cbr.close_interval();
    const double mean = vues.empty() ? 0.0 : sum / static_cast<double>(vues.size());
    metrics.record_cbr(t, mean);
    if (log) log->cbr(t, mean);
  }

  int neighbours(std::size_t r, Subframe t) const {
    const double radius = cfg.congestion.density_radius_m;
    int count = 0;
    if (cfg.congestion.density_source == DensitySource::ground_truth) {
      for (std::size_t s = 0; s < vues.size(); ++s) {
        if (s != r && distance_m(poses[r], poses[s], cfg.scenario) <= radius) ++count;
      }
      return count;
    }
    const auto since = static_cast<std::int32_t>(t - cfg.congestion.control_period_ms);
    for (std::int32_t heard : vues[r].heard_near) count += heard >= since ? 1 : 0;
    return count;
  }

  void control_update(Subframe t) {
    ControlSample s;
    s.time_ms = t;
    s.min_itt_ms = std::numeric_limits<int>::max();
    s.min_tx_power_dbm = std::numeric_limits<double>::infinity();
    s.max_tx_power_dbm = -std::numeric_limits<double>::infinity();
    double itt_sum = 0.0;
    double power_sum = 0.0;
    for (std::size_t r = 0; r < vues.size(); ++r) {
      Vue& v = vues[r];
      if (uses_rate_control(cfg.scheme)) {
        const int before = v.cc.itt_ms;
        rate_control(density_from_count(neighbours(r, t), cfg.congestion.density_radius_m), v.cc,
                     cfg.congestion);
        if (v.cc.itt_ms != before) v.force_reselect = true;
      }
      if (uses_power_control(cfg.scheme)) power_control(v.cbr.last_cbr(), v.cc, cfg.congestion);
      ++s.updates;
      itt_sum += v.cc.itt_ms;
      power_sum += v.cc.tx_power_dbm;
      s.min_itt_ms = std::min(s.min_itt_ms, v.cc.itt_ms);
      s.max_itt_ms = std::max(s.max_itt_ms, v.cc.itt_ms);
      s.min_tx_power_dbm = std::min(s.min_tx_power_dbm, v.cc.tx_power_dbm);
      s.max_tx_power_dbm = std::max(s.max_tx_power_dbm, v.cc.tx_power_dbm);
      if (t >= cfg.warmup_ms) {
        ++counters.control_updates;
        counters.max_itt_ms = std::max(counters.max_itt_ms, v.cc.itt_ms);
        if (v.cc.itt_ms == cfg.congestion.itt_min_ms && v.cc.tx_power_dbm == cfg.congestion.power_max_dbm) {
          ++counters.dormant_updates;
        }
      }
    }
    if (s.updates == 0) return;
    s.mean_itt_ms = itt_sum / s.updates;
    s.mean_tx_power_dbm = power_sum / s.updates;
    metrics.record_control(s);
    if (log) log->control(s);
  }

  void step() {
    const Subframe n = now;
    for (std::size_t i = 0; i < poses.size(); ++i) poses[i] = pose_at(initial[i], n, cfg.scenario);

    for (auto& v : vues) {
      if (v.pending && v.pending->decide_at <= n) run_selection(v, n);
    }
    transmit(n);
    receive_all(n);

    const Subframe t = n + 1;
    if (t % cfg.congestion.cbr_interval_ms == 0) close_cbr_interval(t);
    if (t % cfg.congestion.control_period_ms == 0) control_update(t);
    if (t % cfg.sps.sensing_window_ms == 0) {
      for (auto& v : vues) v.history.prune(t);
    }
    now = t;
  }
};

Simulation::Simulation(const SimConfig& cfg) : Simulation(cfg, initial_poses(cfg)) {}

Simulation::Simulation(const SimConfig& cfg, std::vector<VuePose> poses) {
  cfg.validate();
  impl_ = std::make_unique<Impl>(cfg, std::move(poses));
}

Simulation::~Simulation() = default;

void Simulation::pin_template(VueId vue, Subframe first_tx, int subchannel) {
  Impl& s = *impl_;
  if (vue >= s.vues.size()) throw std::out_of_range("pin_template: no such vehicle");
  if (subchannel < 0 || subchannel >= s.grid.slots_per_subframe()) {
    throw std::out_of_range("pin_template: subchannel outside the grid");
  }
  Vue& v = s.vues[vue];
  v.pending.reset();
  v.sps.current = ResourceId{first_tx, subchannel};
  v.next_tx = first_tx;
  v.sps.reselection_counter = draw_reselection_counter(v.sps.rri_ms, s.cfg.sps, v.scheduler_rng);
}

void Simulation::set_event_log(EventLogWriter* log) {
  impl_->log = log;
  if (log) log->header(impl_->cfg, impl_->initial);
}

void Simulation::set_reception_observer(std::function<void(const ReceptionOutcome&)> f) {
  impl_->on_rx = std::move(f);
}

void Simulation::set_transmission_observer(std::function<void(const TransmissionEvent&, bool)> f) {
  impl_->on_tx = std::move(f);
}

void Simulation::step() { impl_->step(); }

void Simulation::run() {
  while (impl_->now < impl_->cfg.duration_ms) impl_->step();
}

Subframe Simulation::now() const { return impl_->now; }
std::size_t Simulation::vehicle_count() const { return impl_->vues.size(); }
const SimConfig& Simulation::config() const { return impl_->cfg; }
const GridConfig& Simulation::grid() const { return impl_->grid; }
const std::vector<VuePose>& Simulation::initial() const { return impl_->initial; }
const std::vector<VuePose>& Simulation::poses() const { return impl_->poses; }
const MetricsCollector& Simulation::metrics() const { return impl_->metrics; }
const RunCounters& Simulation::counters() const { return impl_->counters; }
const CongestionState& Simulation::congestion(VueId vue) const { return impl_->vues.at(vue).cc; }

RunMetadata Simulation::metadata() const {
  RunMetadata m;
  m.seed = impl_->cfg.seed;
  m.scheme = std::string(to_string(impl_->cfg.scheme));
  m.config_hash = impl_->cfg.hash();
  m.vehicle_count = impl_->vues.size();
  m.config = impl_->cfg.entries();
  return m;
}

RunResult run_simulation(const SimConfig& cfg, const RunOptions& options) {
  Simulation sim(cfg);
  std::ofstream log_stream;
  std::optional<EventLogWriter> writer;
  if (options.event_log) {
    if (options.event_log->has_parent_path()) std::filesystem::create_directories(options.event_log->parent_path());
    log_stream.open(*options.event_log, std::ios::binary);
    if (!log_stream) throw std::runtime_error("cannot write event log " + options.event_log->string());
    writer.emplace(log_stream);
    sim.set_event_log(&*writer);
  }
  sim.run();
  const RunMetadata meta = sim.metadata();
  if (options.out_dir) finalize(sim.metrics(), meta, *options.out_dir);
  return RunResult{meta, sim.metrics(), sim.counters()};
}

}  // namespace v2x
