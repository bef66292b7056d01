#include <doctest.h>

#include <string>
#include <vector>

#include "v2x/oneshot.hpp"

using namespace v2x;

namespace {

// Drives a state whose counter is already drawn and records the resource
// each of `n` transmissions uses: 'T' template, 'O' one-shot.
std::string schedule(int first_counter, int n, std::uint64_t seed) {
  const OneShotConfig cfg;
  Rng rng(seed);
  OneShotState s;
  s.counter = first_counter;
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (take_next_action(s) == OneShotAction::transmit_on_oneshot) {
      out += 'O';
      continue;
    }
    out += 'T';
    on_periodic_tx(s, cfg, rng);
  }
  return out;
}

}  // namespace

TEST_CASE("counter 2 diverts the third transmission") {
  CHECK(schedule(2, 4, 1) == "TTOT");
}

TEST_CASE("counter 6 diverts the seventh transmission") {
  CHECK(schedule(6, 8, 1) == "TTTTTTOT");
}

TEST_CASE("one-shots are isolated and spaced 2 to 6 template transmissions apart") {
  const std::string s = schedule(4, 5000, 42);
  int run = 0;
  bool first = true;
  for (char c : s) {
    if (c == 'T') {
      ++run;
      continue;
    }
    if (!first) {
      CHECK(run >= 2);
      CHECK(run <= 6);
    }
    first = false;
    run = 0;
  }
  CHECK(s.find("OO") == std::string::npos);
}

TEST_CASE("counter redraws average 4") {
  const OneShotConfig cfg;
  Rng rng(2024);
  long sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const int c = make_oneshot_state(cfg, rng).counter;
    CHECK(c >= 2);
    CHECK(c <= 6);
    sum += c;
  }
  CHECK(sum / 10000.0 == doctest::Approx(4.0).epsilon(0.05 / 4.0));
}

TEST_CASE("diverted fraction is one fifth") {
  const std::string s = schedule(3, 20000, 7);
  long diverted = 0;
  for (char c : s) diverted += c == 'O' ? 1 : 0;
  CHECK(diverted / 20000.0 == doctest::Approx(0.2).epsilon(0.02 / 0.2));
}

TEST_CASE("oneshot config validation") {
  OneShotConfig cfg;
  cfg.counter_min = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.counter_max = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
