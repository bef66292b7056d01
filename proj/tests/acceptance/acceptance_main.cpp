// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
// criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "../support/sps_oracle.hpp"
#include "v2x/config.hpp"
#include "v2x/congestion.hpp"
#include "v2x/event_log.hpp"
#include "v2x/phy_channel.hpp"
#include "v2x/sbsps.hpp"
#include "v2x/simulation.hpp"

using namespace v2x;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeeds[] = {1, 2, 3};
constexpr int kBins = 10;

struct Summary {
  std::array<std::optional<double>, kBins> prr{};
  std::array<std::uint64_t, kBins> attempted{};
  // IA at CCDF 1e-2 and 1e-3, per IA bin.
  std::optional<Subframe> ia[2][2];
  RunCounters counters;
  double mean_cbr = 0.0;
  bool cbr_in_range = true;
  bool ccdf_monotone = true;
  bool bins_consistent = true;
  double seconds = 0.0;
};

struct Cell {
  double density;
  Scheme scheme;
  int bandwidth;
  auto operator<=>(const Cell&) const = default;
};

std::map<std::pair<Cell, std::uint64_t>, Summary> g_runs;

const char* density_name(double d) { return d == kLowDensity ? "low" : "heavy"; }

std::string cell_name(const Cell& c) {
  return std::string(density_name(c.density)) + "/" + std::string(to_string(c.scheme)) + "/" +
         std::to_string(c.bandwidth) + "MHz";
}

Summary summarise(const RunResult& r) {
  Summary s;
  const auto& bins = r.metrics.prr().bins();
  std::uint64_t a = 0;
  std::uint64_t rx = 0;
  for (int b = 0; b < kBins; ++b) {
    s.prr[b] = bins[static_cast<std::size_t>(b)].prr();
    s.attempted[b] = bins[static_cast<std::size_t>(b)].attempted;
    a += bins[static_cast<std::size_t>(b)].attempted;
    rx += bins[static_cast<std::size_t>(b)].received;
    if (bins[static_cast<std::size_t>(b)].received > bins[static_cast<std::size_t>(b)].attempted) {
      s.bins_consistent = false;
    }
  }
  s.bins_consistent = s.bins_consistent && a == r.metrics.prr().total_attempted() &&
                      rx == r.metrics.prr().total_received();
  const auto& ia = r.metrics.ia();
  const int lattice = r.metrics.config().ia_lattice_ms;
  for (std::size_t b = 0; b < 2; ++b) {
    s.ia[b][0] = ia.value_at_ccdf(b, 1e-2, lattice);
    s.ia[b][1] = ia.value_at_ccdf(b, 1e-3, lattice);
    const auto c = ia.ccdf(b, lattice);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].second > 1.0 || (i > 0 && c[i].second > c[i - 1].second)) s.ccdf_monotone = false;
    }
  }
  for (const auto& c : r.metrics.cbr()) {
    if (!(c.mean_cbr >= 0.0 && c.mean_cbr <= 1.0)) s.cbr_in_range = false;
  }
  s.counters = r.counters;
  s.mean_cbr = r.metrics.mean_cbr();
  return s;
}

const Summary& run(const Cell& c, std::uint64_t seed) {
  const auto key = std::make_pair(c, seed);
  if (auto it = g_runs.find(key); it != g_runs.end()) return it->second;
  const auto t0 = std::chrono::steady_clock::now();
  const SimConfig cfg = desk_scale_config(c.density, c.scheme, seed, c.bandwidth);
  Summary s = summarise(run_simulation(cfg));
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("  run %-24s seed %llu: %6.1f s  prr", cell_name(c).c_str(), static_cast<unsigned long long>(seed),
              s.seconds);
  for (int b = 0; b < 5; ++b) std::printf(" %.3f", s.prr[b].value_or(-1.0));
  std::printf("  ia0@1e-3 %lld ia1@1e-2 %lld ia1@1e-3 %lld\n", static_cast<long long>(s.ia[0][1].value_or(-1)),
              static_cast<long long>(s.ia[1][0].value_or(-1)), static_cast<long long>(s.ia[1][1].value_or(-1)));
  std::fflush(stdout);
  return g_runs.emplace(key, s).first->second;
}

double prr_of(const Summary& s, int bin) { return s.prr[static_cast<std::size_t>(bin)].value_or(std::nan("")); }

/// Mean over seeds of the bin PRR; NaN when any seed has no attempts there.
double mean_prr(const Cell& c, int bin) {
  double sum = 0.0;
  for (auto seed : kSeeds) sum += prr_of(run(c, seed), bin);
  return sum / std::size(kSeeds);
}

double ia_ms(const Summary& s, int ia_bin, int which) {
  const auto& v = s.ia[ia_bin][which];
  return v ? static_cast<double>(*v) : std::nan("");
}

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string f0(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f", v);
  return buf;
}

const Scheme kSchemes[] = {Scheme::no_cc, Scheme::cc_rate_power, Scheme::rate_only, Scheme::oneshot_rc};
const double kDensities[] = {kLowDensity, kHeavyDensity};

int g_failures = 0;

void report(int n, const std::string& title, const Verdict& v, const std::string& measured) {
  std::printf("CRITERION %d %s: %s | %s%s%s\n", n, v.pass ? "PASS" : "FAIL", title.c_str(), measured.c_str(),
              v.detail.empty() ? "" : " | failing: ", v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++g_failures;
}

void criterion1() {
  Verdict v;
  std::string measured;
  for (double d : kDensities) {
    for (Scheme s : kSchemes) {
      const Cell c{d, s, 10};
      std::string vals;
      for (auto seed : kSeeds) {
        const double p = prr_of(run(c, seed), 0);
        vals += (vals.empty() ? "" : "/") + f3(p);
        v.require(p > 0.85, cell_name(c) + " seed " + std::to_string(seed) + " " + f3(p));
      }
      measured += cell_name(c) + " " + vals + " ";
    }
  }
  report(1, "PRR[0,100) > 0.85 for every density, scheme and seed", v, measured);
}

void criterion2() {
  Verdict v;
  std::string measured;
  const Cell c{kHeavyDensity, Scheme::no_cc, 10};
  for (auto seed : kSeeds) {
    const auto& s = run(c, seed);
    const double gap = prr_of(s, 0) - prr_of(s, 2);
    measured += "seed " + std::to_string(seed) + " gap " + f3(gap) + " ";
    v.require(gap >= 0.15, "seed " + std::to_string(seed));
  }
  report(2, "heavy no_cc: PRR[200,300) at least 15 pp below PRR[0,100)", v, measured);
}

void criterion3() {
  Verdict v;
  std::string measured;
  for (int bin : {1, 2}) {
    const double base = mean_prr({kHeavyDensity, Scheme::no_cc, 10}, bin);
    const double rc = mean_prr({kHeavyDensity, Scheme::rate_only, 10}, bin);
    const double gain = rc / base - 1.0;
    measured += "bin " + std::to_string(bin) + " no_cc " + f3(base) + " rc_only " + f3(rc) + " gain " +
                f3(gain) + " ";
    v.require(gain >= 0.20, "bin " + std::to_string(bin));
  }
  report(3, "heavy: rc_only PRR >= 1.2 x no_cc in [100,200) and [200,300)", v, measured);
}

void criterion4() {
  Verdict v;
  std::string measured;
  for (double d : kDensities) {
    double worst = 0.0;
    for (int bin = 0; bin < 5; ++bin) {
      const double diff = std::abs(mean_prr({d, Scheme::cc_rate_power, 10}, bin) - mean_prr({d, Scheme::rate_only, 10}, bin));
      worst = std::max(worst, diff);
      v.require(diff <= 0.05, std::string(density_name(d)) + " bin " + std::to_string(bin) + " " + f3(diff));
    }
    measured += std::string(density_name(d)) + " max |cc - rc_only| " + f3(worst) + " ";
  }
  report(4, "|PRR(cc) - PRR(rc_only)| <= 5 pp per bin up to 500 m", v, measured);
}

void criterion5() {
  Verdict v;
  std::string measured;
  // {ia bin, ccdf index, required reduction}
  const std::tuple<int, int, double> checks[] = {{0, 1, 200.0}, {1, 0, 500.0}};
  for (const auto& [bin, which, need] : checks) {
    double sum = 0.0;
    std::string per_seed;
    for (auto seed : kSeeds) {
      const double diff = ia_ms(run({kHeavyDensity, Scheme::no_cc, 10}, seed), bin, which) -
                          ia_ms(run({kHeavyDensity, Scheme::rate_only, 10}, seed), bin, which);
      sum += diff;
      per_seed += (per_seed.empty() ? "" : "/") + f0(diff);
      v.require(diff > 0.0, "direction seed " + std::to_string(seed) + " bin " + std::to_string(bin));
    }
    const double mean = sum / std::size(kSeeds);
    measured += std::string(bin == 0 ? "0-200m@1e-3" : "200-300m@1e-2") + " reduction " + per_seed + " ms (mean " +
                f0(mean) + ") ";
    v.require(mean >= need, "mean reduction " + f0(mean) + " < " + f0(need));
  }
  report(5, "heavy: rc_only lowers IA tails by >= 200 ms (0-200 m, 1e-3) and >= 500 ms (200-300 m, 1e-2)", v,
         measured);
}

void criterion6() {
  Verdict v;
  std::string measured;
  double os_sum = 0.0;
  double rc_sum = 0.0;
  std::string per_seed;
  for (auto seed : kSeeds) {
    const double os = ia_ms(run({kHeavyDensity, Scheme::oneshot_rc, 10}, seed), 1, 1);
    const double rc = ia_ms(run({kHeavyDensity, Scheme::rate_only, 10}, seed), 1, 1);
    os_sum += os;
    rc_sum += rc;
    per_seed += (per_seed.empty() ? "" : " ") + f0(os) + "<" + f0(rc);
  }
  const double os_mean = os_sum / std::size(kSeeds);
  const double rc_mean = rc_sum / std::size(kSeeds);
  measured += "IA 200-300m@1e-3 oneshot_rc vs rc_only " + per_seed + " (mean " + f0(os_mean) + " vs " +
              f0(rc_mean) + ") ";
  v.require(os_mean < rc_mean, "IA tail not lower");
  double worst = 0.0;
  for (int bin = 0; bin < kBins; ++bin) {
    const double a = mean_prr({kHeavyDensity, Scheme::oneshot_rc, 10}, bin);
    const double b = mean_prr({kHeavyDensity, Scheme::rate_only, 10}, bin);
    if (std::isnan(a) || std::isnan(b)) continue;
    const double diff = std::abs(a - b);
    worst = std::max(worst, diff);
    v.require(diff <= 0.03, "PRR bin " + std::to_string(bin) + " differs by " + f3(diff));
  }
  measured += "max |PRR diff| " + f3(worst);
  report(6, "heavy: oneshot_rc IA tail below rc_only, PRR within 3 pp per bin", v, measured);
}

void criterion7() {
  Verdict v;
  std::string measured;
  double best_far_gain = -1.0;
  for (double d : kDensities) {
    double worst = 1.0;
    for (auto seed : kSeeds) {
      const auto& narrow = run({d, Scheme::no_cc, 10}, seed);
      const auto& wide = run({d, Scheme::no_cc, 20}, seed);
      for (int bin = 0; bin < kBins; ++bin) {
        const double a = prr_of(wide, bin);
        const double b = prr_of(narrow, bin);
        if (std::isnan(a) || std::isnan(b)) continue;
        worst = std::min(worst, a - b);
        v.require(a >= b, std::string(density_name(d)) + " seed " + std::to_string(seed) + " bin " +
                              std::to_string(bin) + " 20MHz " + f3(a) + " < 10MHz " + f3(b));
        if (d == kHeavyDensity && bin >= 2) best_far_gain = std::max(best_far_gain, a - b);
      }
    }
    measured += std::string(density_name(d)) + " min(20-10) " + f3(worst) + " ";
  }
  measured += "heavy best gain beyond 200 m " + f3(best_far_gain);
  v.require(best_far_gain >= 0.05, "no heavy bin beyond 200 m gains 5 pp");
  report(7, "PRR(20 MHz) >= PRR(10 MHz) per bin and seed, >= 5 pp gain beyond 200 m at heavy", v, measured);
}

void criterion8() {
  Verdict v;
  std::string measured;
  for (Scheme s : {Scheme::cc_rate_power, Scheme::rate_only}) {
    std::uint64_t updates = 0;
    std::uint64_t dormant = 0;
    for (auto seed : kSeeds) {
      const auto& k = run({kLowDensity, s, 10}, seed).counters;
      updates += k.control_updates;
      dormant += k.dormant_updates;
      v.require(k.max_itt_ms == 100 && k.min_tx_power_dbm == 23.0,
                std::string(to_string(s)) + " seed " + std::to_string(seed) + " left the dormant point");
    }
    measured += std::string(to_string(s)) + " " + std::to_string(dormant) + "/" + std::to_string(updates) + " ";
    v.require(updates > 0 && dormant == updates, std::string(to_string(s)) + " not fully dormant");
  }
  report(8, "low density: every control update at itt 100 ms and 23 dBm under cc and rc_only", v, measured);
}

void criterion9() {
  Verdict v;
  std::mt19937_64 rng(0x5b5b5);
  int matched = 0;
  int raised = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    const auto in = oracle::random_instance(rng);
    const auto want = oracle::enumerate(in);
    const auto got = build_candidates(oracle::history_for(in), in.now, in.needed, in.grid, in.sps);
    if (oracle::matches(got, want)) ++matched;
    if (want.raises > 0) ++raised;
  }
  v.require(matched == trials, std::to_string(trials - matched) + " mismatches");
  v.require(raised > 0, "no instance exercised the threshold loop");
  report(9, "build_candidates equals the brute-force enumerator", v,
         std::to_string(matched) + "/" + std::to_string(trials) + " instances, " + std::to_string(raised) +
             " with threshold raises");
}

// Two vehicles 50 m apart in the same lane, both pinned to the same template.
bool mutual_reception(Scheme scheme, std::uint64_t seed, int periods) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.scheme = scheme;
  cfg.sps.keep_probability = 1.0;
  cfg.warmup_ms = 0;
  const Subframe first = 1100;
  cfg.duration_ms = first + static_cast<Subframe>(periods) * 100;
  std::vector<VuePose> poses{{0, 0, 100.0, 1}, {1, 0, 150.0, 1}};
  Simulation sim(cfg, poses);
  sim.pin_template(0, first, 1);
  sim.pin_template(1, first, 1);
  bool heard = false;
  sim.set_reception_observer([&](const ReceptionOutcome& o) {
    if (o.success && o.subframe >= first) heard = true;
  });
  sim.run();
  return heard;
}

void criterion10() {
  Verdict v;
  int rc_heard = 0;
  int os_heard = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    rc_heard += mutual_reception(Scheme::rate_only, seed, 20) ? 1 : 0;
    os_heard += mutual_reception(Scheme::oneshot_rc, seed, 20) ? 1 : 0;
  }
  // A much longer pinned rc_only run must stay silent too.
  const bool long_silent = !mutual_reception(Scheme::rate_only, 4242, 600);
  v.require(rc_heard == 0, "rc_only heard in " + std::to_string(rc_heard) + " trials");
  v.require(long_silent, "rc_only heard within 600 periods");
  v.require(os_heard >= 99, "oneshot_rc heard in only " + std::to_string(os_heard) + " trials");
  report(10, "pinned collision: none heard under rc_only, >= 99/100 heard within 20 periods under oneshot_rc", v,
         "rc_only " + std::to_string(rc_heard) + "/100, oneshot_rc " + std::to_string(os_heard) +
             "/100, rc_only 600 periods " + (long_silent ? "silent" : "heard"));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion11() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "v2x_acceptance_c11";
  fs::remove_all(root);
  int compared = 0;
  for (Scheme s : {Scheme::no_cc, Scheme::oneshot_rc}) {
    const SimConfig cfg = desk_scale_config(kLowDensity, s, 11);
    const fs::path a = root / (std::string(to_string(s)) + "_a");
    const fs::path b = root / (std::string(to_string(s)) + "_b");
    const fs::path r = root / (std::string(to_string(s)) + "_replay");
    RunOptions oa;
    oa.out_dir = a;
    oa.event_log = a / "events.log";
    RunOptions ob;
    ob.out_dir = b;
    run_simulation(cfg, oa);
    run_simulation(cfg, ob);
    replay_file(a / "events.log", r);
    for (const char* f : {"prr.csv", "ia_ccdf.csv", "cbr.csv", "control.csv", "metadata.json"}) {
      const std::string ref = slurp(a / f);
      v.require(!ref.empty(), std::string(f) + " empty");
      v.require(ref == slurp(b / f), std::string(to_string(s)) + " rerun differs in " + f);
      v.require(ref == slurp(r / f), std::string(to_string(s)) + " replay differs in " + f);
      ++compared;
    }
  }
  fs::remove_all(root);
  report(11, "identical config and seed give identical files; replay reproduces them", v,
         std::to_string(compared) + " files compared for rerun and replay");
}

void criterion12() {
  Verdict v;
  std::string measured;

  // CBR against hand-counted traces.
  CbrTracker t(-92.0);
  std::vector<std::pair<ResourceId, double>> trace;
  for (int i = 0; i < 500; ++i) trace.push_back({{i / 5, i % 5}, i % 500 < 137 ? -91.0 : -104.0});
  const double c137 = update_cbr(t, trace);
  v.require(c137 == 137.0 / 500.0, "cbr trace 137/500 gave " + f3(c137));
  trace.clear();
  for (int i = 0; i < 100; ++i) trace.push_back({{i, 0}, i % 2 ? -80.0 : -100.0});
  v.require(update_cbr(t, trace) == 0.5, "cbr half trace");
  v.require(update_cbr(t, {}) == 0.5, "cbr carry-forward");

  bool cbr_ok = true;
  bool ccdf_ok = true;
  bool bins_ok = true;
  for (const auto& [key, s] : g_runs) {
    cbr_ok = cbr_ok && s.cbr_in_range;
    ccdf_ok = ccdf_ok && s.ccdf_monotone;
    bins_ok = bins_ok && s.bins_consistent;
  }
  v.require(cbr_ok, "cbr outside [0,1] in a run");
  v.require(ccdf_ok, "non-monotone ccdf in a run");
  v.require(bins_ok, "prr bins disagree with global counters in a run");

  const ChannelConfig ch;
  const double below = pathloss_db(ch.breakpoint_m * (1.0 - 1e-12), ch);
  const double above = pathloss_db(ch.breakpoint_m * (1.0 + 1e-12), ch);
  v.require(std::abs(above - below) < 1e-6, "pathloss jumps at the breakpoint");

  CandidateSet five;
  for (int i = 0; i < 5; ++i) five.candidates.push_back({0, i});
  Rng rng(777);
  std::array<int, 5> hits{};
  for (int i = 0; i < 10000; ++i) ++hits[static_cast<std::size_t>(select_resource(five, rng).subchannel)];
  double chi2 = 0.0;
  for (int h : hits) {
    chi2 += (h - 2000.0) * (h - 2000.0) / 2000.0;
    v.require(h >= 1850 && h <= 2150, "candidate drawn " + std::to_string(h) + " times");
  }
  v.require(chi2 < 18.467, "chi-square " + f3(chi2));
  measured = "cbr traces ok, " + std::to_string(g_runs.size()) + " runs checked, breakpoint step " +
             std::to_string(std::abs(above - below)) + " dB, chi2 " + f3(chi2);
  report(12, "property suites: cbr, ccdf, prr counters, pathloss continuity, selection uniformity", v, measured);
}

}  // namespace

// Optional arguments select criteria by number; the default runs all twelve.
int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();
  std::printf("desk scale: 1200 m ring, 30 s measured after 2 s warmup, seeds 1-3\n");
  const std::vector<std::pair<int, std::function<void()>>> criteria{
      {9, criterion9}, {10, criterion10}, {11, criterion11}, {8, criterion8}, {1, criterion1}, {2, criterion2},
      {3, criterion3}, {4, criterion4},   {5, criterion5},   {6, criterion6}, {7, criterion7}, {12, criterion12}};
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int ran = 0;
  for (const auto& [n, c] : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), n) == wanted.end()) continue;
    c();
    ++ran;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of %d criteria failed (%.0f s)\n", g_failures, ran, total);
  return g_failures == 0 ? 0 : 1;
}
