#pragma once

#include <optional>

#include "v2x/resource_grid.hpp"
#include "v2x/rng.hpp"

namespace v2x {

struct OneShotConfig {
  int counter_min = 2;
  int counter_max = 6;

  void validate() const;
};

struct OneShotState {
  int counter = 0;
  /// Set when the next periodic transmission is to be diverted.
  bool divert_next = false;
  /// Resource picked for the pending diversion, once selected.
  std::optional<ResourceId> pending_oneshot;
};

enum class OneShotAction { transmit_on_template, transmit_on_oneshot };

OneShotState make_oneshot_state(const OneShotConfig& cfg, Rng& rng);

/// Bookkeeping after a periodic (template) transmission: the counter
/// decrements, and on reaching zero the next transmission is marked for
/// diversion and the counter is redrawn. The returned action applies to the
/// next transmission. Diverted transmissions never call this.
OneShotAction on_periodic_tx(OneShotState& state, const OneShotConfig& cfg, Rng& rng);

/// Consumes the pending diversion, if any, for the transmission about to happen.
OneShotAction take_next_action(OneShotState& state);

}  // namespace v2x
