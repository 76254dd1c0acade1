#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridres/adp.hpp"

namespace gridres {

// Monte Carlo evaluation of the greedy policy induced by a frozen value
// table. Per-path logs carry enough to replay every period's cost exactly.
struct PolicyEvalReport {
  struct Step {
    int t = 1;
    std::vector<int> failed;  // failed line ids observed at t
    std::vector<int> open;    // action: dispatchable lines held open
    double cost = 0.0;
    double shed_mw = 0.0;
  };
  struct PathLog {
    int path = 0;
    double total_cost = 0.0;
    std::vector<Step> steps;
  };

  double mean_cost = 0.0;
  double std_error = 0.0;
  std::vector<double> shed_mwh_per_period;  // mean over paths, index t-1
  uint64_t table_misses = 0;  // chosen actions whose estimate was unseen
  uint64_t paths = 0;
  uint64_t seed = 0;
  std::vector<PathLog> path_logs;

  nlohmann::json to_json() const;
  static PolicyEvalReport from_json(const nlohmann::json& j);
};

// Simulates `paths` seeded storm realizations (stream = path index), applying
// bellman_action_select with the frozen table at every period. Honors the
// GRIDRES_THREADS environment variable; results are identical regardless of
// thread count (ordered reduction, per-path streams).
PolicyEvalReport evaluate_policy(const Network& net, const Scenario& scenario,
                                 const ValueTable& vt, int paths,
                                 uint64_t seed, CostOracle* oracle = nullptr);

// Recomputes every step cost of a report from its logs; used to verify
// replayability. Throws NumericalError on any mismatch.
void verify_replay(const Network& net, const Scenario& scenario,
                   const PolicyEvalReport& report, CostOracle* oracle = nullptr);

void write_report_json(const PolicyEvalReport& report, const std::string& path);

}  // namespace gridres
