#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "gridres/adp.hpp"

namespace gridres {

// Exact backward induction over the reachable (period, failed map, open set)
// tree. Keys are canonical state encodings.
struct DpResult {
  std::map<std::string, double> state_values;  // MarkovState.encode() -> v_t(S)
  std::map<std::string, double> pds_values;    // PostDecisionState.encode()
  std::map<std::string, SwitchConfig> policy;  // state encode -> argmin action
  uint64_t state_count = 0;
  // Set when two full states with distinct repair clocks landed on one
  // post-decision key with conflicting values (impossible in bundled data).
  bool pds_alias_conflict = false;

  double root_value() const;  // value of the initial state
  nlohmann::json to_json() const;
};

// Guard: throws InputError when the reachable state count exceeds `state_cap`.
DpResult exact_dp(const Network& net, const Scenario& scenario,
                  CostOracle* oracle = nullptr, uint64_t state_cap = 1000000);

void write_dp_values_json(const DpResult& dp, const std::string& path);

}  // namespace gridres
