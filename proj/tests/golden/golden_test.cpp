// Compares freshly generated CSVs against the frozen copies in V2X_GOLDEN_DIR.
// Run with V2X_UPDATE_GOLDEN=1 to rewrite them after an intended change.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "v2x/metrics.hpp"
#include "v2x/simulation.hpp"

using namespace v2x;
namespace fs = std::filesystem;

namespace {

const fs::path kGolden = V2X_GOLDEN_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void compare(const std::string& name, const std::string& actual) {
  const fs::path frozen = kGolden / name;
  if (std::getenv("V2X_UPDATE_GOLDEN")) {
    fs::create_directories(kGolden);
    std::ofstream(frozen, std::ios::binary) << actual;
  }
  INFO(name);
  REQUIRE(fs::exists(frozen));
  CHECK(slurp(frozen) == actual);
}

SimConfig golden_config() {
  SimConfig c;
  c.seed = 7;
  c.scheme = Scheme::oneshot_rc;
  c.scenario.road_length_m = 600.0;
  c.scenario.density_veh_per_100m = 8.0;
  c.warmup_ms = 1000;
  c.duration_ms = 5000;
  return c;
}

}  // namespace

TEST_CASE("hand-built metrics fold") {
  ScenarioConfig road;
  road.lane_width_m = 4.0;
  const std::vector<VuePose> poses{{0, 0, 0.0, 1}, {1, 0, 150.0, 1}, {2, 3, 250.0, -1}, {3, 0, 1150.0, 1}};
  MetricsConfig mc;
  mc.warmup_ms = 0;
  MetricsCollector m(mc, road, poses.size());
  auto ok = [](VueId tx, VueId rx, Subframe t) {
    ReceptionOutcome o;
    o.tx = tx;
    o.rx = rx;
    o.subframe = t;
    o.success = true;
    return o;
  };
  for (Subframe t = 0; t < 2000; t += 100) {
    TransmissionEvent e;
    e.tx = 0;
    e.subframe = t;
    m.record_tx(e, poses);
    if (t % 300 != 0) m.record_rx(ok(0, 1, t), poses, t);
    if (t % 500 == 0) m.record_rx(ok(0, 2, t), poses, t);
  }
  m.record_cbr(100, 0.125);
  m.record_cbr(200, 1.0 / 3.0);
  RunMetadata meta;
  meta.seed = 42;
  meta.scheme = "no_cc";
  meta.config_hash = 0x0123456789abcdefULL;

  std::ostringstream prr;
  write_prr_csv(prr, m.prr(), meta);
  compare("fold_prr.csv", prr.str());
  std::ostringstream ia;
  write_ia_csv(ia, m.ia(), 10, meta);
  compare("fold_ia_ccdf.csv", ia.str());
  std::ostringstream cbr;
  write_cbr_csv(cbr, m.cbr(), meta);
  compare("fold_cbr.csv", cbr.str());
}

TEST_CASE("small oneshot_rc run") {
  const fs::path out = fs::temp_directory_path() / "v2x_golden_run";
  fs::remove_all(out);
  RunOptions opt;
  opt.out_dir = out;
  run_simulation(golden_config(), opt);
  for (const char* f : {"prr.csv", "ia_ccdf.csv", "cbr.csv", "control.csv", "metadata.json"}) {
    compare(std::string("run_") + f, slurp(out / f));
  }
  fs::remove_all(out);
}
