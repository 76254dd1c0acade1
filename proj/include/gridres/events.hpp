#pragma once

#include <vector>

#include "gridres/network.hpp"
#include "gridres/rng.hpp"
#include "gridres/scenario.hpp"
#include "gridres/state.hpp"

namespace gridres {

struct Transition {
  MarkovState successor;
  double probability = 0.0;  // > 0; zero-probability outcomes are omitted
};

// Advances `state` (whose open set must already reflect the applied action)
// to period t+1: adds new_failures with failure period t+1, removes lines
// whose repair completes (t+1 >= T^f + ΔT^r). Repaired dispatchable lines
// rejoin open; non-dispatchable lines rejoin at their initial position.
// Throws InputError if a new failure is not an at-risk survivor of t+1.
MarkovState markov_state_update(const Network& net, const MarkovState& state,
                                const std::vector<int>& new_failures,
                                const Scenario& scenario);

// Probability of the successor whose new-failure set is successor_failures:
// the product over at-risk surviving lines of p (failing) or 1-p (surviving).
// Returns 0 for impossible successors (e.g. naming a line not at risk).
double transition_probability(const MarkovState& state,
                              const SwitchConfig& action,
                              const std::vector<int>& successor_failures,
                              const Scenario& scenario);

// All successors of (state, action) with positive probability; probabilities
// sum to 1 within 1e-12. Throws InputError when more than 20 at-risk lines
// survive (2^k guard).
std::vector<Transition> enumerate_successors(const Network& net,
                                             const MarkovState& state,
                                             const SwitchConfig& action,
                                             const Scenario& scenario);

// Samples one successor: each at-risk surviving line (ascending id — one
// uniform draw each) fails independently with its probability.
MarkovState sample_transition(const Network& net, const MarkovState& state,
                              const SwitchConfig& action,
                              const Scenario& scenario, RngStream& rng);

}  // namespace gridres
