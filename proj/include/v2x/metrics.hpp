#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "v2x/phy_channel.hpp"
#include "v2x/scenario.hpp"

namespace v2x {

struct MetricsConfig {
  double bin_width_m = 100.0;
  double max_range_m = 1000.0;
  int ia_lattice_ms = 10;
  /// Transmissions before this subframe are not counted; IA bookkeeping
  /// still runs so the first post-warmup gap is a real gap.
  Subframe warmup_ms = 2000;
};

/// Packet reception ratio by transmitter-receiver distance.
class PrrAccumulator {
 public:
  struct Bin {
    double low_m = 0.0;
    double high_m = 0.0;
    std::uint64_t attempted = 0;
    std::uint64_t received = 0;

    /// Empty when nothing was attempted in the bin.
    std::optional<double> prr() const {
      if (attempted == 0) return std::nullopt;
      return static_cast<double>(received) / static_cast<double>(attempted);
    }
  };

  PrrAccumulator(double bin_width_m = 100.0, double max_range_m = 1000.0);

  /// Bin index, or -1 beyond the range. The range end is inclusive.
  int bin_of(double distance_m) const;
  void add_attempt(double distance_m);
  void add_reception(double distance_m);

  const std::vector<Bin>& bins() const { return bins_; }
  std::uint64_t total_attempted() const { return total_attempted_; }
  std::uint64_t total_received() const { return total_received_; }

 private:
  double bin_width_m_;
  double max_range_m_;
  std::vector<Bin> bins_;
  std::uint64_t total_attempted_ = 0;
  std::uint64_t total_received_ = 0;
};

struct IaBin {
  std::string label;
  double low_m = 0.0;
  double high_m = 0.0;
};

std::vector<IaBin> default_ia_bins();

/// Information age: gaps between consecutive successful receptions of the
/// same transmitter at the same receiver, routed to a distance bin by the
/// pair distance at reception time.
class IaAccumulator {
 public:
  explicit IaAccumulator(std::size_t vue_count, std::vector<IaBin> bins = default_ia_bins());

  /// Updates the pair's last reception. Returns the gap if a sample was added.
  std::optional<Subframe> on_reception(VueId rx, VueId tx, Subframe now, double distance_m, bool emit);
  void add_sample(std::size_t bin, Subframe gap_ms);
  int bin_of(double distance_m) const;

  const std::vector<IaBin>& bins() const { return bins_; }
  std::uint64_t sample_count(std::size_t bin) const { return counts_[bin]; }

  /// P[gap > x] for x on the lattice 0, step, ... up to the largest sample
  /// rounded up to the lattice. Empty for a bin without samples.
  std::vector<std::pair<Subframe, double>> ccdf(std::size_t bin, int lattice_ms) const;
  /// Smallest lattice point whose CCDF is at most `p`.
  std::optional<Subframe> value_at_ccdf(std::size_t bin, double p, int lattice_ms) const;

 private:
  std::size_t vue_count_;
  std::vector<IaBin> bins_;
  std::vector<Subframe> last_;
  std::vector<std::vector<std::uint64_t>> histograms_;
  std::vector<std::uint64_t> counts_;
};

struct CbrSample {
  Subframe time_ms = 0;
  double mean_cbr = 0.0;
};

/// Aggregate of one congestion-control update across all vehicles.
struct ControlSample {
  Subframe time_ms = 0;
  int updates = 0;
  double mean_itt_ms = 0.0;
  int min_itt_ms = 0;
  int max_itt_ms = 0;
  double mean_tx_power_dbm = 0.0;
  double min_tx_power_dbm = 0.0;
  double max_tx_power_dbm = 0.0;
};

class MetricsCollector {
 public:
  MetricsCollector(const MetricsConfig& cfg, const ScenarioConfig& scenario, std::size_t vue_count);

  /// Counts one attempt for every other vehicle within range at transmission
  /// time, including receivers blocked by half duplex.
  void record_tx(const TransmissionEvent& event, std::span<const VuePose> poses);
  /// Successful receptions only.
  void record_rx(const ReceptionOutcome& outcome, std::span<const VuePose> poses, Subframe now);
  void record_cbr(Subframe time_ms, double mean_cbr);
  void record_control(const ControlSample& sample);

  const MetricsConfig& config() const { return cfg_; }
  const PrrAccumulator& prr() const { return prr_; }
  const IaAccumulator& ia() const { return ia_; }
  const std::vector<CbrSample>& cbr() const { return cbr_; }
  const std::vector<ControlSample>& control() const { return control_; }
  double mean_cbr() const;

 private:
  MetricsConfig cfg_;
  ScenarioConfig scenario_;
  PrrAccumulator prr_;
  IaAccumulator ia_;
  std::vector<CbrSample> cbr_;
  std::vector<ControlSample> control_;
};

struct RunMetadata {
  std::uint64_t seed = 0;
  std::string scheme;
  std::uint64_t config_hash = 0;
  std::size_t vehicle_count = 0;
  /// Canonical key = value lines of the configuration.
  std::vector<std::pair<std::string, std::string>> config;
};

std::string hash_hex(std::uint64_t h);
std::string csv_banner(const RunMetadata& meta);

void write_prr_csv(std::ostream& os, const PrrAccumulator& prr, const RunMetadata& meta);
void write_ia_csv(std::ostream& os, const IaAccumulator& ia, int lattice_ms, const RunMetadata& meta);
void write_cbr_csv(std::ostream& os, const std::vector<CbrSample>& cbr, const RunMetadata& meta);
void write_control_csv(std::ostream& os, const std::vector<ControlSample>& control, const RunMetadata& meta);
void write_metadata_json(std::ostream& os, const MetricsCollector& m, const RunMetadata& meta);

/// Writes prr.csv, ia_ccdf.csv, cbr.csv, control.csv and metadata.json to `dir`.
void finalize(const MetricsCollector& metrics, const RunMetadata& meta, const std::filesystem::path& dir);

}  // namespace v2x
