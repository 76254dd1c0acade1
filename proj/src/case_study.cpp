#include "gridres/case_study.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>

#include "gridres/common.hpp"
#include "gridres/events.hpp"

namespace gridres {

namespace {

nlohmann::json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  input_check(in.good(), std::string("cannot open ") + what + ": " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string(what) + " " + path + ": " + e.what());
  }
  return j;
}

nlohmann::json id_name_list(const Network& net, const std::vector<int>& ids) {
  nlohmann::json out = nlohmann::json::array();
  for (int id : ids)
    out.push_back({{"id", id}, {"name", net.line(id).name()}});
  return out;
}

}  // namespace

nlohmann::json StrategyTable::to_json(const Network& net) const {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const StrategyRow& r : rows) {
    j["rows"].push_back({{"period", r.period},
                         {"observed_failures", id_name_list(net, r.observed_failures)},
                         {"opened", id_name_list(net, r.opened)},
                         {"closed", id_name_list(net, r.closed)}});
  }
  return j;
}

Replay Replay::load(const std::string& path, const Scenario& scenario) {
  nlohmann::json j = read_json_file(path, "replay file");
  Replay r;
  r.failures_at.assign(static_cast<size_t>(scenario.horizon), {});
  input_check(j.contains("periods") && j["periods"].is_array(),
              "replay: missing 'periods' array");
  for (const auto& block : j["periods"]) {
    input_check(block.contains("t") && block["t"].is_number_integer(),
                "replay: period block needs integer 't'");
    int t = block["t"].get<int>();
    input_check(t >= 2 && t <= scenario.horizon,
                "replay: failures can only arrive in periods 2..horizon");
    auto& slot = r.failures_at[static_cast<size_t>(t - 1)];
    input_check(slot.empty(), "replay: duplicate block for period " +
                                  std::to_string(t));
    input_check(block.contains("failures") && block["failures"].is_array(),
                "replay: period block needs a 'failures' array");
    for (const auto& f : block["failures"]) {
      input_check(f.is_number_integer(), "replay: failures must be line ids");
      int id = f.get<int>();
      bool at_risk = false;
      for (const auto& risk : scenario.risks_at(t))
        if (risk.line == id && risk.p > 0) at_risk = true;
      input_check(at_risk, "replay: line " + std::to_string(id) +
                               " is not at risk in period " +
                               std::to_string(t));
      slot.push_back(id);
    }
    std::sort(slot.begin(), slot.end());
    input_check(std::adjacent_find(slot.begin(), slot.end()) == slot.end(),
                "replay: line listed twice in period " + std::to_string(t));
  }
  return r;
}

StrategyTable replay_strategy(const Network& net, const Scenario& scenario,
                              const ValueTable& vt, const Replay& replay,
                              CostOracle* oracle) {
  input_check(static_cast<int>(replay.failures_at.size()) == scenario.horizon,
              "replay: one failure slot per period required");
  StrategyTable table;
  MarkovState state = initial_state(net);
  for (int t = 1; t <= scenario.horizon; ++t) {
    BellmanChoice choice =
        bellman_action_select(net, state, vt, scenario, oracle);
    StrategyRow row;
    row.period = t;
    if (t >= 2) {
      // Lines that arrived failed on the transition into this period.
      for (int id : replay.failures_at[static_cast<size_t>(t - 1)])
        row.observed_failures.push_back(id);
    }
    // Operations relative to the switch positions entering the period.
    for (int id : choice.action.open_lines)
      if (!std::binary_search(state.open_dispatchable.begin(),
                              state.open_dispatchable.end(), id))
        row.opened.push_back(id);
    for (int id : state.open_dispatchable)
      if (!std::binary_search(choice.action.open_lines.begin(),
                              choice.action.open_lines.end(), id))
        row.closed.push_back(id);
    table.rows.push_back(std::move(row));

    if (t < scenario.horizon) {
      MarkovState applied = state;
      applied.open_dispatchable = choice.action.open_lines;
      state = markov_state_update(
          net, applied, replay.failures_at[static_cast<size_t>(t)], scenario);
    }
  }
  return table;
}

std::vector<PostDecisionState> load_probes(const std::string& path) {
  nlohmann::json j = read_json_file(path, "probes file");
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    input_check(j.contains("probes") && j["probes"].is_array(),
                "probes: expected an array or {\"probes\": [...]}");
    list = &j["probes"];
  }
  input_check(list->is_array(), "probes: expected an array");
  std::vector<PostDecisionState> out;
  for (const auto& entry : *list) {
    input_check(entry.is_string(), "probes: entries are encoded states");
    out.push_back(PostDecisionState::decode(entry.get<std::string>()));
  }
  return out;
}

CaseStudyResult run_case_study(const std::string& name,
                               const CaseOverrides& overrides,
                               const std::string& data_dir,
                               CostOracle* oracle) {
  namespace fs = std::filesystem;
  const std::string base = data_dir + "/" + name;

  CaseStudyResult result;
  result.name = name;
  result.net = load_network(base + ".json");
  result.scenario = load_scenario(base + "_storm.json", result.net);

  if (overrides.failure_rate) {
    input_check(*overrides.failure_rate >= 0 && *overrides.failure_rate <= 1,
                "case study: failure rate outside [0,1]");
    for (auto& slot : result.scenario.at_risk)
      for (AtRiskLine& a : slot) a.p = *overrides.failure_rate;
  }
  if (overrides.eta) {
    input_check(*overrides.eta > 0, "case study: eta must be positive");
    std::fill(result.scenario.eta.begin(), result.scenario.eta.end(),
              *overrides.eta);
  }

  ADPConfig config;
  config.iterations = overrides.iterations.value_or(1500);
  if (overrides.epsilon) config.epsilon = *overrides.epsilon;
  config.exploration = overrides.exploration.value_or(0.0);
  config.seed = overrides.seed.value_or(result.scenario.seed);
  if (fs::exists(base + "_probes.json"))
    config.probes = load_probes(base + "_probes.json");

  std::unique_ptr<CostOracle> local;
  if (!oracle) {
    local = std::make_unique<CostOracle>(result.net);
    oracle = local.get();
  } else {
    input_check(oracle->network().content_hash() == result.net.content_hash(),
                "case study: shared oracle belongs to a different network");
  }
  result.training = train(result.net, result.scenario, config, oracle);

  Replay replay;
  if (fs::exists(base + "_replay.json")) {
    replay = Replay::load(base + "_replay.json", result.scenario);
  } else {
    replay.failures_at.assign(static_cast<size_t>(result.scenario.horizon), {});
  }
  result.strategy = replay_strategy(result.net, result.scenario,
                                    result.training.table, replay, oracle);

  // Out-of-sample evaluation: a seed offset keeps the Monte Carlo storms
  // disjoint from the training streams.
  result.report =
      evaluate_policy(result.net, result.scenario, result.training.table,
                      overrides.eval_paths.value_or(500), config.seed + 1,
                      oracle);
  return result;
}

void write_case_outputs(const CaseStudyResult& result,
                        const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_trace_csv(result.training, out_dir + "/trace.csv");
  std::ofstream strategy(out_dir + "/strategy.json");
  input_check(strategy.good(), "cannot write strategy under " + out_dir);
  strategy << result.strategy.to_json(result.net).dump(2) << "\n";
  write_report_json(result.report, out_dir + "/report.json");
  save_value_table(result.training.table, result.training.header,
                   out_dir + "/values.json");
}

}  // namespace gridres
