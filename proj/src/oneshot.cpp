#include "v2x/oneshot.hpp"

#include "v2x/types.hpp"

namespace v2x {

void OneShotConfig::validate() const {
  if (counter_min < 1 || counter_max < counter_min) {
    throw ConfigError("one-shot counter range must satisfy 1 <= min <= max");
  }
}

OneShotState make_oneshot_state(const OneShotConfig& cfg, Rng& rng) {
  OneShotState s;
  s.counter = uniform_int(rng, cfg.counter_min, cfg.counter_max);
  return s;
}

OneShotAction on_periodic_tx(OneShotState& state, const OneShotConfig& cfg, Rng& rng) {
  if (state.counter > 0) --state.counter;
  if (state.counter == 0) {
    state.divert_next = true;
    state.counter = uniform_int(rng, cfg.counter_min, cfg.counter_max);
  }
  return state.divert_next ? OneShotAction::transmit_on_oneshot : OneShotAction::transmit_on_template;
}

OneShotAction take_next_action(OneShotState& state) {
  if (!state.divert_next) return OneShotAction::transmit_on_template;
  state.divert_next = false;
  state.pending_oneshot.reset();
  return OneShotAction::transmit_on_oneshot;
}

}  // namespace v2x
