#include "v2x/event_log.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace v2x {

namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void expect_fields(const std::vector<std::string>& f, std::size_t n, long lineno) {
  if (f.size() != n) {
    throw std::runtime_error("event log line " + std::to_string(lineno) + ": expected " +
                             std::to_string(n) + " fields, got " + std::to_string(f.size()));
  }
}

}  // namespace

void EventLogWriter::header(const SimConfig& cfg, std::span<const VuePose> initial_poses) {
  os_ << "# v2x-event-log 1\n";
  for (const auto& [k, v] : cfg.entries()) os_ << '@' << k << " = " << v << '\n';
  for (const auto& p : initial_poses) {
    os_ << "P," << p.id << ',' << p.lane << ',' << real(p.longitudinal_m) << ',' << p.direction << '\n';
  }
}

void EventLogWriter::tx(const TransmissionEvent& e) {
  os_ << "T," << e.subframe << ',' << e.packet_id << ',' << e.tx << ',' << e.subchannel_start << ','
      << e.subchannel_count << ',' << real(e.tx_power_dbm) << ',' << e.rri_ms << '\n';
}

void EventLogWriter::rx(const ReceptionOutcome& o) {
  os_ << "R," << o.subframe << ',' << o.packet_id << ',' << o.tx << ',' << o.rx << ',' << real(o.sinr_db)
      << '\n';
}

void EventLogWriter::cbr(Subframe time_ms, double mean_cbr) {
  os_ << "C," << time_ms << ',' << real(mean_cbr) << '\n';
}

void EventLogWriter::control(const ControlSample& s) {
  os_ << "K," << s.time_ms << ',' << s.updates << ',' << real(s.mean_itt_ms) << ',' << s.min_itt_ms << ','
      << s.max_itt_ms << ',' << real(s.mean_tx_power_dbm) << ',' << real(s.min_tx_power_dbm) << ','
      << real(s.max_tx_power_dbm) << '\n';
}

void replay(std::istream& log, const std::filesystem::path& out_dir) {
  std::string line;
  long lineno = 0;
  std::string config_text;
  std::vector<VuePose> initial;
  SimConfig cfg;
  std::unique_ptr<MetricsCollector> metrics;
  std::vector<VuePose> poses;
  Subframe poses_at = -1;

  auto ensure_ready = [&] {
    if (metrics) return;
    cfg = parse_config(config_text);
    metrics = std::make_unique<MetricsCollector>(cfg.metrics_config(), cfg.scenario, initial.size());
  };
  auto poses_for = [&](Subframe t) -> std::span<const VuePose> {
    if (t != poses_at) {
      poses = advance(initial, t, cfg.scenario);
      poses_at = t;
    }
    return poses;
  };

  while (std::getline(log, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '@') {
      config_text += line.substr(1) + "\n";
      continue;
    }
    const auto f = split(line);
    const std::string& kind = f[0];
    if (kind == "P") {
      expect_fields(f, 5, lineno);
      initial.push_back({static_cast<VueId>(std::stoul(f[1])), std::stoi(f[2]), std::stod(f[3]),
                         std::stoi(f[4])});
      continue;
    }
    ensure_ready();
    if (kind == "T") {
      expect_fields(f, 8, lineno);
      TransmissionEvent e;
      e.subframe = std::stoll(f[1]);
      e.packet_id = std::stoull(f[2]);
      e.tx = static_cast<VueId>(std::stoul(f[3]));
      e.subchannel_start = std::stoi(f[4]);
      e.subchannel_count = std::stoi(f[5]);
      e.tx_power_dbm = std::stod(f[6]);
      e.rri_ms = std::stoi(f[7]);
      metrics->record_tx(e, poses_for(e.subframe));
    } else if (kind == "R") {
      expect_fields(f, 6, lineno);
      ReceptionOutcome o;
      o.subframe = std::stoll(f[1]);
      o.packet_id = std::stoull(f[2]);
      o.tx = static_cast<VueId>(std::stoul(f[3]));
      o.rx = static_cast<VueId>(std::stoul(f[4]));
      o.sinr_db = std::stod(f[5]);
      o.success = true;
      metrics->record_rx(o, poses_for(o.subframe), o.subframe);
    } else if (kind == "C") {
      expect_fields(f, 3, lineno);
      metrics->record_cbr(std::stoll(f[1]), std::stod(f[2]));
    } else if (kind == "K") {
      expect_fields(f, 9, lineno);
      ControlSample s;
      s.time_ms = std::stoll(f[1]);
      s.updates = std::stoi(f[2]);
      s.mean_itt_ms = std::stod(f[3]);
      s.min_itt_ms = std::stoi(f[4]);
      s.max_itt_ms = std::stoi(f[5]);
      s.mean_tx_power_dbm = std::stod(f[6]);
      s.min_tx_power_dbm = std::stod(f[7]);
      s.max_tx_power_dbm = std::stod(f[8]);
      metrics->record_control(s);
    } else {
      throw std::runtime_error("event log line " + std::to_string(lineno) + ": unknown record '" + kind +
                               "'");
    }
  }
  ensure_ready();
  RunMetadata meta;
  meta.seed = cfg.seed;
  meta.scheme = std::string(to_string(cfg.scheme));
  meta.config_hash = cfg.hash();
  meta.vehicle_count = initial.size();
  meta.config = cfg.entries();
  finalize(*metrics, meta, out_dir);
}

void replay_file(const std::filesystem::path& log, const std::filesystem::path& out_dir) {
  std::ifstream in(log);
  if (!in) throw std::runtime_error("cannot read event log " + log.string());
  replay(in, out_dir);
}

}  // namespace v2x
