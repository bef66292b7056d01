#include "v2x/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace v2x {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string canonical_key(const std::string& key) {
  if (key == "scheme" || key == "density" || key == "seed") return key;
  if (key == "bandwidth" || key == "bandwidth_mhz") return "bandwidth_mhz";
  throw ConfigError("sweep axis must be one of scheme, density, bandwidth, seed: '" + key + "'");
}

struct CellKey {
  std::string scheme;
  std::string density;
  int bandwidth_mhz;
  auto operator<=>(const CellKey&) const = default;
};

/// Runs grouped by cell, keeping first-appearance order of the cells.
std::vector<std::pair<CellKey, std::vector<std::size_t>>> group_cells(const SweepOutcome& sweep) {
  std::vector<std::pair<CellKey, std::vector<std::size_t>>> cells;
  std::map<CellKey, std::size_t> index;
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    const auto& r = sweep.runs[i];
    CellKey key{r.scheme, r.density, r.bandwidth_mhz};
    auto [it, inserted] = index.emplace(key, cells.size());
    if (inserted) cells.push_back({key, {}});
    cells[it->second].second.push_back(i);
  }
  return cells;
}

}  // namespace

SweepAxis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("sweep axis needs key=v1,v2,...: '" + std::string(text) + "'");
  SweepAxis axis;
  axis.key = canonical_key(trim(text.substr(0, eq)));
  std::string_view rest = text.substr(eq + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string v = trim(rest.substr(0, comma));
    if (!v.empty()) axis.values.push_back(std::move(v));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (axis.values.empty()) throw ConfigError("sweep axis '" + axis.key + "' has no values");
  return axis;
}

std::vector<SweepRun> expand_sweep(const SimConfig& base, const std::vector<SweepAxis>& axes) {
  std::set<std::string> seen_keys;
  for (const auto& a : axes) {
    const std::string key = canonical_key(a.key);
    if (!seen_keys.insert(key).second) throw ConfigError("sweep axis '" + key + "' given twice");
    if (a.values.empty()) throw ConfigError("sweep axis '" + key + "' has no values");
  }

  SweepRun seed_run;
  seed_run.config = base;
  seed_run.scheme = std::string(to_string(base.scheme));
  seed_run.density = fmt_g(base.scenario.density_veh_per_100m);
  seed_run.bandwidth_mhz = base.bandwidth_mhz;
  seed_run.seed = base.seed;
  std::vector<SweepRun> runs{seed_run};

  for (const auto& a : axes) {
    const std::string key = canonical_key(a.key);
    std::vector<SweepRun> next;
    for (const auto& r : runs) {
      for (const auto& v : a.values) {
        SweepRun x = r;
        x.config.set(key, v);
        if (key == "density") x.density = v;
        x.scheme = std::string(to_string(x.config.scheme));
        x.bandwidth_mhz = x.config.bandwidth_mhz;
        x.seed = x.config.seed;
        next.push_back(std::move(x));
      }
    }
    runs = std::move(next);
  }

  std::set<std::string> names;
  for (auto& r : runs) {
    r.config.validate();
    r.name = r.scheme + "_" + r.density + "_" + std::to_string(r.bandwidth_mhz) + "_s" + std::to_string(r.seed);
    if (!names.insert(r.name).second) throw ConfigError("conflicting output path: two runs map to '" + r.name + "'");
  }
  return runs;
}

SweepOutcome run_sweep(const std::vector<SweepRun>& runs, const std::filesystem::path& out_dir, int jobs) {
  std::set<std::string> names;
  for (const auto& r : runs) {
    if (!names.insert(r.name).second) throw ConfigError("conflicting output path: '" + r.name + "'");
  }
  std::filesystem::create_directories(out_dir);

  std::vector<std::optional<RunResult>> slots(runs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      try {
        RunOptions opt;
        opt.out_dir = out_dir / runs[i].name;
        slots[i] = run_simulation(runs[i].config, opt);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(runs.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SweepOutcome out;
  out.runs = runs;
  for (auto& s : slots) out.results.push_back(std::move(*s));

  std::ofstream prr(out_dir / "combined_prr.csv", std::ios::binary);
  write_combined_prr(prr, out);
  std::ofstream ia(out_dir / "combined_ia.csv", std::ios::binary);
  write_combined_ia(ia, out);
  if (!prr || !ia) throw std::runtime_error("cannot write combined tables in " + out_dir.string());
  return out;
}

void write_combined_prr(std::ostream& os, const SweepOutcome& sweep) {
  os << "scheme,density,bandwidth_mhz,bin_low_m,bin_high_m,runs,attempted,received,prr_mean,prr_min,prr_max\n";
  char buf[64];
  for (const auto& [cell, members] : group_cells(sweep)) {
    const auto& first_bins = sweep.results[members.front()].metrics.prr().bins();
    for (std::size_t b = 0; b < first_bins.size(); ++b) {
      int runs = 0;
      std::uint64_t attempted = 0;
      std::uint64_t received = 0;
      double sum = 0.0;
      double lo = 1.0;
      double hi = 0.0;
      for (std::size_t i : members) {
        const auto& bin = sweep.results[i].metrics.prr().bins()[b];
        attempted += bin.attempted;
        received += bin.received;
        if (const auto p = bin.prr()) {
          ++runs;
          sum += *p;
          lo = std::min(lo, *p);
          hi = std::max(hi, *p);
        }
      }
      os << cell.scheme << ',' << cell.density << ',' << cell.bandwidth_mhz << ','
         << fmt_g(first_bins[b].low_m) << ',' << fmt_g(first_bins[b].high_m) << ',' << runs << ','
         << attempted << ',' << received;
      if (runs == 0) {
        os << ",,,\n";
        continue;
      }
      std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f\n", sum / runs, lo, hi);
      os << buf;
    }
  }
}

void write_combined_ia(std::ostream& os, const SweepOutcome& sweep) {
  os << "scheme,density,bandwidth_mhz,bin_label,ia_ms,runs,ccdf_mean,ccdf_min,ccdf_max\n";
  char buf[96];
  for (const auto& [cell, members] : group_cells(sweep)) {
    const auto& bins = sweep.results[members.front()].metrics.ia().bins();
    for (std::size_t b = 0; b < bins.size(); ++b) {
      std::vector<std::vector<std::pair<Subframe, double>>> curves;
      int lattice = 10;
      for (std::size_t i : members) {
        const auto& m = sweep.results[i].metrics;
        lattice = m.config().ia_lattice_ms;
        auto c = m.ia().ccdf(b, lattice);
        if (!c.empty()) curves.push_back(std::move(c));
      }
      if (curves.empty()) continue;
      Subframe end = 0;
      for (const auto& c : curves) end = std::max(end, c.back().first);
      for (Subframe x = 0; x <= end; x += lattice) {
        const auto idx = static_cast<std::size_t>(x / lattice);
        double sum = 0.0;
        double lo = 1.0;
        double hi = 0.0;
        for (const auto& c : curves) {
          const double v = idx < c.size() ? c[idx].second : 0.0;  // past the largest sample
          sum += v;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        std::snprintf(buf, sizeof buf, ",%lld,%zu,%.9g,%.9g,%.9g\n", static_cast<long long>(x), curves.size(),
                      sum / static_cast<double>(curves.size()), lo, hi);
        os << cell.scheme << ',' << cell.density << ',' << cell.bandwidth_mhz << ',' << bins[b].label << buf;
      }
    }
  }
}

}  // namespace v2x
