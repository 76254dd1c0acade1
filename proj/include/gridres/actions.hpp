#pragma once

#include <vector>

#include "gridres/network.hpp"
#include "gridres/state.hpp"

namespace gridres {

// All radial switch configurations reachable from `state`: every assignment
// over dispatchable surviving lines such that the effective closed set passes
// is_radial. Result is sorted lexicographically on the open-line id list and
// cached per (network, failed set). An empty result signals total outage.
// Throws InputError when more than 20 dispatchable lines survive (2^m guard).
const std::vector<SwitchConfig>& enumerate_actions(const Network& net,
                                                   const MarkovState& state);

// Drops cached enumerations (used by tests that mutate network copies).
void clear_action_cache();

}  // namespace gridres
