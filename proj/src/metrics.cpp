#include "v2x/metrics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace v2x {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

}  // namespace

PrrAccumulator::PrrAccumulator(double bin_width_m, double max_range_m)
    : bin_width_m_(bin_width_m), max_range_m_(max_range_m) {
  const int n = static_cast<int>(std::ceil(max_range_m / bin_width_m));
  for (int i = 0; i < n; ++i) {
    bins_.push_back({i * bin_width_m, std::min(max_range_m, (i + 1) * bin_width_m), 0, 0});
  }
}

int PrrAccumulator::bin_of(double distance_m) const {
  if (distance_m < 0.0 || distance_m > max_range_m_) return -1;
  const int b = static_cast<int>(distance_m / bin_width_m_);
  return std::min(b, static_cast<int>(bins_.size()) - 1);
}

void PrrAccumulator::add_attempt(double distance_m) {
  const int b = bin_of(distance_m);
  if (b < 0) return;
  ++bins_[static_cast<std::size_t>(b)].attempted;
  ++total_attempted_;
}

void PrrAccumulator::add_reception(double distance_m) {
  const int b = bin_of(distance_m);
  if (b < 0) return;
  ++bins_[static_cast<std::size_t>(b)].received;
  ++total_received_;
}

std::vector<IaBin> default_ia_bins() { return {{"0-200", 0.0, 200.0}, {"200-300", 200.0, 300.0}}; }

IaAccumulator::IaAccumulator(std::size_t vue_count, std::vector<IaBin> bins)
    : vue_count_(vue_count),
      bins_(std::move(bins)),
      last_(vue_count * vue_count, -1),
      histograms_(bins_.size()),
      counts_(bins_.size(), 0) {}

int IaAccumulator::bin_of(double distance_m) const {
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    if (distance_m >= bins_[i].low_m && distance_m < bins_[i].high_m) return static_cast<int>(i);
  }
  return -1;
}

std::optional<Subframe> IaAccumulator::on_reception(VueId rx, VueId tx, Subframe now, double distance_m,
                                                    bool emit) {
  Subframe& last = last_[static_cast<std::size_t>(rx) * vue_count_ + tx];
  const Subframe previous = last;
  last = now;
  if (previous < 0 || !emit || now <= previous) return std::nullopt;
  const int b = bin_of(distance_m);
  if (b < 0) return std::nullopt;
  add_sample(static_cast<std::size_t>(b), now - previous);
  return now - previous;
}

void IaAccumulator::add_sample(std::size_t bin, Subframe gap_ms) {
  auto& h = histograms_[bin];
  if (h.size() <= static_cast<std::size_t>(gap_ms)) h.resize(static_cast<std::size_t>(gap_ms) + 1, 0);
  ++h[static_cast<std::size_t>(gap_ms)];
  ++counts_[bin];
}

std::vector<std::pair<Subframe, double>> IaAccumulator::ccdf(std::size_t bin, int lattice_ms) const {
  std::vector<std::pair<Subframe, double>> out;
  const auto& h = histograms_[bin];
  const std::uint64_t n = counts_[bin];
  if (n == 0) return out;
  const auto max_gap = static_cast<Subframe>(h.size()) - 1;
  const Subframe top = ((max_gap + lattice_ms - 1) / lattice_ms) * lattice_ms;
  // above[x] = number of samples strictly greater than x.
  std::uint64_t above = n;
  Subframe cursor = 0;  // samples <= cursor - 1 have been removed
  for (Subframe x = 0; x <= top; x += lattice_ms) {
    for (; cursor <= x && cursor <= max_gap; ++cursor) above -= h[static_cast<std::size_t>(cursor)];
    out.emplace_back(x, static_cast<double>(above) / static_cast<double>(n));
  }
  return out;
}

std::optional<Subframe> IaAccumulator::value_at_ccdf(std::size_t bin, double p, int lattice_ms) const {
  for (const auto& [x, c] : ccdf(bin, lattice_ms)) {
    if (c <= p) return x;
  }
  return std::nullopt;
}

MetricsCollector::MetricsCollector(const MetricsConfig& cfg, const ScenarioConfig& scenario,
                                   std::size_t vue_count)
    : cfg_(cfg), scenario_(scenario), prr_(cfg.bin_width_m, cfg.max_range_m), ia_(vue_count) {}

void MetricsCollector::record_tx(const TransmissionEvent& event, std::span<const VuePose> poses) {
  if (event.subframe < cfg_.warmup_ms) return;
  const VuePose& tx = poses[event.tx];
  for (const auto& rx : poses) {
    if (rx.id == event.tx) continue;
    prr_.add_attempt(distance_m(tx, rx, scenario_));
  }
}

void MetricsCollector::record_rx(const ReceptionOutcome& outcome, std::span<const VuePose> poses,
                                 Subframe now) {
  if (!outcome.success) return;
  const double d = distance_m(poses[outcome.tx], poses[outcome.rx], scenario_);
  const bool counted = now >= cfg_.warmup_ms;
  if (counted) prr_.add_reception(d);
  ia_.on_reception(outcome.rx, outcome.tx, now, d, counted);
}

void MetricsCollector::record_cbr(Subframe time_ms, double mean_cbr) {
  if (time_ms < cfg_.warmup_ms) return;
  cbr_.push_back({time_ms, mean_cbr});
}

void MetricsCollector::record_control(const ControlSample& sample) {
  if (sample.time_ms < cfg_.warmup_ms) return;
  control_.push_back(sample);
}

double MetricsCollector::mean_cbr() const {
  if (cbr_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& c : cbr_) s += c.mean_cbr;
  return s / static_cast<double>(cbr_.size());
}

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string csv_banner(const RunMetadata& meta) {
  return "# config_hash=" + hash_hex(meta.config_hash) + " seed=" + std::to_string(meta.seed) +
         " scheme=" + meta.scheme + "\n";
}

void write_prr_csv(std::ostream& os, const PrrAccumulator& prr, const RunMetadata& meta) {
  os << csv_banner(meta) << "bin_low_m,bin_high_m,attempted,received,prr\n";
  for (const auto& b : prr.bins()) {
    os << fmt("%g", b.low_m) << ',' << fmt("%g", b.high_m) << ',' << b.attempted << ',' << b.received
       << ',';
    if (auto p = b.prr()) os << fmt("%.6f", *p);
    os << '\n';
  }
}

void write_ia_csv(std::ostream& os, const IaAccumulator& ia, int lattice_ms, const RunMetadata& meta) {
  os << csv_banner(meta) << "bin_label,ia_ms,ccdf\n";
  for (std::size_t b = 0; b < ia.bins().size(); ++b) {
    for (const auto& [x, c] : ia.ccdf(b, lattice_ms)) {
      os << ia.bins()[b].label << ',' << x << ',' << fmt("%.9g", c) << '\n';
    }
  }
}

void write_cbr_csv(std::ostream& os, const std::vector<CbrSample>& cbr, const RunMetadata& meta) {
  os << csv_banner(meta) << "time_ms,mean_cbr\n";
  for (const auto& c : cbr) os << c.time_ms << ',' << fmt("%.6f", c.mean_cbr) << '\n';
}

void write_control_csv(std::ostream& os, const std::vector<ControlSample>& control,
                       const RunMetadata& meta) {
  os << csv_banner(meta)
     << "time_ms,updates,mean_itt_ms,min_itt_ms,max_itt_ms,mean_tx_power_dbm,min_tx_power_dbm,"
        "max_tx_power_dbm\n";
  for (const auto& c : control) {
    os << c.time_ms << ',' << c.updates << ',' << fmt("%.3f", c.mean_itt_ms) << ',' << c.min_itt_ms << ','
       << c.max_itt_ms << ',' << fmt("%.3f", c.mean_tx_power_dbm) << ','
       << fmt("%.3f", c.min_tx_power_dbm) << ',' << fmt("%.3f", c.max_tx_power_dbm) << '\n';
  }
}

void write_metadata_json(std::ostream& os, const MetricsCollector& m, const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["config_hash"] = hash_hex(meta.config_hash);
  j["seed"] = meta.seed;
  j["scheme"] = meta.scheme;
  j["vehicle_count"] = meta.vehicle_count;
  j["prr_attempted"] = m.prr().total_attempted();
  j["prr_received"] = m.prr().total_received();
  j["mean_cbr"] = fmt("%.6f", m.mean_cbr());
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : meta.config) cfg[k] = v;
  j["config"] = cfg;
  os << j.dump(2) << '\n';
}

void finalize(const MetricsCollector& metrics, const RunMetadata& meta, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto os = open_out(dir / "prr.csv");
    write_prr_csv(os, metrics.prr(), meta);
  }
  {
    auto os = open_out(dir / "ia_ccdf.csv");
    write_ia_csv(os, metrics.ia(), metrics.config().ia_lattice_ms, meta);
  }
  {
    auto os = open_out(dir / "cbr.csv");
    write_cbr_csv(os, metrics.cbr(), meta);
  }
  {
    auto os = open_out(dir / "control.csv");
    write_control_csv(os, metrics.control(), meta);
  }
  {
    auto os = open_out(dir / "metadata.json");
    write_metadata_json(os, metrics, meta);
  }
}

}  // namespace v2x
