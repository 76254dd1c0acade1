#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gridres/network.hpp"

namespace gridres {

// A reconfiguration action: which dispatchable surviving lines are held open.
// Everything else follows the fixed rules — failed lines are open, closed
// non-dispatchable lines stay closed, initially-open non-dispatchable lines
// stay open (they have no switch to operate).
struct SwitchConfig {
  std::vector<int> open_lines;  // sorted dispatchable line ids

  friend bool operator==(const SwitchConfig&, const SwitchConfig&) = default;
  friend auto operator<=>(const SwitchConfig& a, const SwitchConfig& b) {
    return a.open_lines <=> b.open_lines;
  }
};

// Markov state at a decision epoch: the period, the failed-and-unrepaired
// lines with their failure periods (needed for repair completion), and the
// dispatchable lines currently held open.
struct MarkovState {
  int t = 1;
  std::vector<std::pair<int, int>> failed;  // (line id, failure period), sorted
  std::vector<int> open_dispatchable;       // sorted line ids

  bool is_failed(int line_id) const {
    for (const auto& [id, tf] : failed)
      if (id == line_id) return true;
    return false;
  }
  std::vector<int> failed_ids() const {
    std::vector<int> out;
    out.reserve(failed.size());
    for (const auto& [id, tf] : failed) out.push_back(id);
    return out;
  }

  // Canonical comma-free encoding, e.g. "t2|f7@2.12@3|o33.34". Used as the
  // map key in exact-DP output and in diagnostics.
  std::string encode() const;

  friend bool operator==(const MarkovState&, const MarkovState&) = default;
  friend auto operator<=>(const MarkovState&, const MarkovState&) = default;
};

// State immediately after applying an action, before the next period's
// failures arrive. Keyed by the failed *set*: repair clocks are recoverable
// from scenario at-risk windows in all bundled data (each line is at risk in
// exactly one period).
struct PostDecisionState {
  int t = 1;
  std::vector<int> failed;  // sorted line ids
  std::vector<int> open;    // sorted dispatchable line ids held open

  // e.g. "t1|f|o33.34.35" — no commas, safe inside CSV fields.
  std::string encode() const;
  static PostDecisionState decode(const std::string& text);  // InputError

  friend bool operator==(const PostDecisionState&,
                         const PostDecisionState&) = default;
  friend auto operator<=>(const PostDecisionState&,
                          const PostDecisionState&) = default;
};

MarkovState initial_state(const Network& net);

PostDecisionState post_decision(const MarkovState& state,
                                const SwitchConfig& action);

// Line ids effectively closed under (state, action): surviving non-dispatchable
// lines at their initial position, surviving dispatchable lines per the action.
std::vector<int> effective_closed_ids(const Network& net,
                                      const MarkovState& state,
                                      const SwitchConfig& action);

}  // namespace gridres
