#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridres/network.hpp"

namespace gridres {

struct AtRiskLine {
  int line = 0;    // line id
  double p = 0.0;  // failure probability when the period arrives
};

// A storm scenario: horizon, period length, shedding penalty schedule, the
// per-period at-risk sets, and repair durations. Failures listed under period
// t strike on the transition *into* t; the initial state (t = 1) is observed,
// so a period-1 at-risk block can never fire.
struct Scenario {
  int horizon = 1;
  double dt = 1.0;                  // hours
  std::vector<double> eta;          // $/MWh per period (size == horizon)
  uint64_t seed = 0;
  std::vector<std::vector<AtRiskLine>> at_risk;  // index t-1
  std::map<int, int> repair;        // line id -> periods; absent = no repair

  double eta_at(int t) const { return eta[static_cast<size_t>(t - 1)]; }
  const std::vector<AtRiskLine>& risks_at(int t) const;  // empty past horizon

  // Repair duration, or a sentinel larger than any horizon when absent.
  int repair_duration(int line_id) const;

  static Scenario from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Structural checks plus id existence against a network.
  void validate(const Network& net) const;

  uint64_t content_hash() const;
};

Scenario load_scenario(const std::string& path, const Network& net);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace gridres
