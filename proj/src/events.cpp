#include "gridres/events.hpp"

#include <algorithm>
#include <cmath>

#include "gridres/common.hpp"

namespace gridres {

namespace {

// At-risk lines of period t+1 that have not already failed, ascending id.
std::vector<AtRiskLine> surviving_risks(const MarkovState& state,
                                        const Scenario& scenario) {
  std::vector<AtRiskLine> out;
  if (state.t + 1 > scenario.horizon) return out;
  for (const AtRiskLine& a : scenario.risks_at(state.t + 1))
    if (!state.is_failed(a.line)) out.push_back(a);
  return out;  // risks_at is already sorted by line id
}

}  // namespace

MarkovState markov_state_update(const Network& net, const MarkovState& state,
                                const std::vector<int>& new_failures,
                                const Scenario& scenario) {
  const int t2 = state.t + 1;
  const auto risks = surviving_risks(state, scenario);
  for (int id : new_failures) {
    bool at_risk = std::any_of(risks.begin(), risks.end(),
                               [id](const AtRiskLine& a) { return a.line == id; });
    input_check(at_risk, "transition: line " + std::to_string(id) +
                             " cannot fail in period " + std::to_string(t2) +
                             " (not an at-risk survivor)");
  }

  MarkovState next;
  next.t = t2;
  std::vector<int> repaired;
  for (const auto& [id, tf] : state.failed) {
    if (t2 >= tf + scenario.repair_duration(id))
      repaired.push_back(id);
    else
      next.failed.emplace_back(id, tf);
  }
  for (int id : new_failures) next.failed.emplace_back(id, t2);
  std::sort(next.failed.begin(), next.failed.end());

  // Switch positions: the input state's open set already reflects the applied
  // action. Newly failed lines drop out of it (their position is moot while
  // down); repaired dispatchable lines rejoin open. Non-dispatchable lines
  // rejoin at their initial position, which the state never tracks.
  next.open_dispatchable = state.open_dispatchable;
  auto drop = [&next](int id) {
    auto it = std::find(next.open_dispatchable.begin(),
                        next.open_dispatchable.end(), id);
    if (it != next.open_dispatchable.end()) next.open_dispatchable.erase(it);
  };
  for (int id : new_failures) drop(id);
  for (int id : repaired)
    if (net.lines[net.line_index(id)].dispatchable)
      next.open_dispatchable.push_back(id);
  std::sort(next.open_dispatchable.begin(), next.open_dispatchable.end());
  next.open_dispatchable.erase(std::unique(next.open_dispatchable.begin(),
                                           next.open_dispatchable.end()),
                               next.open_dispatchable.end());
  return next;
}

double transition_probability(const MarkovState& state,
                              const SwitchConfig& /*action*/,
                              const std::vector<int>& successor_failures,
                              const Scenario& scenario) {
  const auto risks = surviving_risks(state, scenario);
  for (int id : successor_failures) {
    bool at_risk = std::any_of(risks.begin(), risks.end(),
                               [id](const AtRiskLine& a) { return a.line == id; });
    if (!at_risk) return 0.0;
  }
  double prob = 1.0;
  for (const AtRiskLine& a : risks) {
    bool fails = std::binary_search(successor_failures.begin(),
                                    successor_failures.end(), a.line);
    prob *= fails ? a.p : 1.0 - a.p;
  }
  return prob;
}

std::vector<Transition> enumerate_successors(const Network& net,
                                             const MarkovState& state,
                                             const SwitchConfig& action,
                                             const Scenario& scenario) {
  const auto risks = surviving_risks(state, scenario);
  const int k = static_cast<int>(risks.size());
  input_check(k <= 20, "enumerate_successors: more than 20 at-risk lines");

  MarkovState base = state;
  base.open_dispatchable = action.open_lines;

  std::vector<Transition> out;
  double total = 0.0;
  for (uint32_t mask = 0; mask < (1u << k); ++mask) {
    double prob = 1.0;
    std::vector<int> fails;
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        prob *= risks[static_cast<size_t>(i)].p;
        fails.push_back(risks[static_cast<size_t>(i)].line);
      } else {
        prob *= 1.0 - risks[static_cast<size_t>(i)].p;
      }
    }
    if (prob <= 0.0) continue;
    total += prob;
    out.push_back({markov_state_update(net, base, fails, scenario), prob});
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw NumericalError("enumerate_successors: probabilities sum to " +
                         std::to_string(total));
  return out;
}

MarkovState sample_transition(const Network& net, const MarkovState& state,
                              const SwitchConfig& action,
                              const Scenario& scenario, RngStream& rng) {
  const auto risks = surviving_risks(state, scenario);
  std::vector<int> fails;
  for (const AtRiskLine& a : risks) {
    // One draw per at-risk survivor, even when p is 0 or 1, so runs that
    // differ only in probabilities consume the stream identically.
    double u = rng.uniform();
    if (u < a.p) fails.push_back(a.line);
  }
  MarkovState base = state;
  base.open_dispatchable = action.open_lines;
  return markov_state_update(net, base, fails, scenario);
}

}  // namespace gridres
