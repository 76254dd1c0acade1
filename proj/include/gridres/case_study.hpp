#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridres/adp.hpp"
#include "gridres/policy_eval.hpp"

namespace gridres {

// One reconfiguration plan row: what was observed entering the period and
// which switches the policy operated relative to the previous period.
struct StrategyRow {
  int period = 1;
  std::vector<int> observed_failures;  // line ids newly failed at this period
  std::vector<int> opened;             // dispatchable lines opened by action
  std::vector<int> closed;             // dispatchable lines closed by action
};

struct StrategyTable {
  std::vector<StrategyRow> rows;
  nlohmann::json to_json(const Network& net) const;  // ids + "from-to" names
};

// A fixed failure realization for deterministic replay:
// {"periods":[{"t":2,"failures":[6]}, ...]} — every listed failure must be an
// at-risk survivor of its period.
struct Replay {
  std::vector<std::vector<int>> failures_at;  // index t-1
  static Replay load(const std::string& path, const Scenario& scenario);
};

// Walks the greedy policy along a fixed realization and records the switching
// plan. Every row's action comes from enumerate_actions, so feasibility holds
// by construction.
StrategyTable replay_strategy(const Network& net, const Scenario& scenario,
                              const ValueTable& vt, const Replay& replay,
                              CostOracle* oracle = nullptr);

struct CaseOverrides {
  std::optional<int> iterations;
  std::optional<double> failure_rate;  // replaces every at-risk probability
  std::optional<EpsilonSpec> epsilon;
  std::optional<double> exploration;
  std::optional<uint64_t> seed;
  std::optional<double> eta;
  std::optional<int> eval_paths;  // default 500
};

struct CaseStudyResult {
  std::string name;
  Network net;
  Scenario scenario;  // after overrides
  TrainResult training;
  StrategyTable strategy;
  PolicyEvalReport report;
};

// Loads data_dir/<name>{.json,_storm.json,_probes.json,_replay.json}, applies
// overrides, trains, replays the bundled realization, and evaluates the
// trained policy. name ∈ {ieee33, ieee123} plus any instance following the
// same file layout (the bundled toys do). Probes and replay files are
// optional. An external `oracle` (for the same network) may be shared across
// runs; dispatch outcomes do not depend on penalties or probabilities.
CaseStudyResult run_case_study(const std::string& name,
                               const CaseOverrides& overrides,
                               const std::string& data_dir,
                               CostOracle* oracle = nullptr);

// trace.csv, strategy.json, report.json and values.json under out_dir.
void write_case_outputs(const CaseStudyResult& result,
                        const std::string& out_dir);

std::vector<PostDecisionState> load_probes(const std::string& path);

}  // namespace gridres
