#include "gridres/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridres/actions.hpp"
#include "gridres/adp.hpp"
#include "gridres/case_study.hpp"
#include "gridres/common.hpp"
#include "gridres/exact_dp.hpp"
#include "gridres/policy_eval.hpp"
#include "gridres/topology.hpp"

namespace gridres {

namespace {

struct CliOptions {
  std::string network, storm, values, probes, replay, out, trace, failed;
  std::string epsilon = "0.1";
  int iterations = 1500;
  double exploration = 0.0;
  double initial_value = 0.0;
  uint64_t seed = 0;
  bool seed_given = false;
  int paths = 500;
  bool do_verify_replay = false;
  uint64_t state_cap = 1000000;
};

int cmd_train(const CliOptions& o) {
  Network net = load_network(o.network);
  Scenario scenario = load_scenario(o.storm, net);
  ADPConfig config;
  config.iterations = o.iterations;
  config.epsilon = EpsilonSpec::parse(o.epsilon);
  config.exploration = o.exploration;
  config.initial_value = o.initial_value;
  config.seed = o.seed_given ? o.seed : scenario.seed;
  if (!o.probes.empty()) config.probes = load_probes(o.probes);

  TrainResult result = train(net, scenario, config);
  if (!o.trace.empty()) write_trace_csv(result, o.trace);
  save_value_table(result.table, result.header,
                   o.out.empty() ? "values.json" : o.out);
  std::cout << "trained " << config.iterations << " iterations, "
            << result.table.size() << " post-decision states\n";
  return 0;
}

int cmd_evaluate(const CliOptions& o) {
  Network net = load_network(o.network);
  Scenario scenario = load_scenario(o.storm, net);
  ValueTable::Header header;
  ValueTable vt = load_value_table(o.values, &header);
  if (header.network_hash && header.network_hash != net.content_hash())
    std::cerr << "warning: value table was trained on a different network\n";
  if (header.scenario_hash && header.scenario_hash != scenario.content_hash())
    std::cerr << "warning: value table was trained on a different storm\n";

  uint64_t seed = o.seed_given ? o.seed : scenario.seed + 1;
  PolicyEvalReport report = evaluate_policy(net, scenario, vt, o.paths, seed);
  if (o.do_verify_replay) verify_replay(net, scenario, report);
  if (!o.out.empty()) write_report_json(report, o.out);
  char buf[128];
  std::snprintf(buf, sizeof buf, "mean cost %.6f +- %.6f over %d paths\n",
                report.mean_cost, report.std_error, o.paths);
  std::cout << buf;
  return 0;
}

int cmd_exact_dp(const CliOptions& o) {
  Network net = load_network(o.network);
  Scenario scenario = load_scenario(o.storm, net);
  DpResult dp = exact_dp(net, scenario, nullptr, o.state_cap);
  if (!o.out.empty()) write_dp_values_json(dp, o.out);
  char buf[128];
  std::snprintf(buf, sizeof buf, "exact value %.10f over %llu states\n",
                dp.root_value(),
                static_cast<unsigned long long>(dp.state_count));
  std::cout << buf;
  if (dp.pds_alias_conflict)
    std::cerr << "warning: post-decision keys alias across repair histories\n";
  return 0;
}

int cmd_strategy(const CliOptions& o) {
  Network net = load_network(o.network);
  Scenario scenario = load_scenario(o.storm, net);
  ValueTable vt = load_value_table(o.values);
  Replay replay = Replay::load(o.replay, scenario);
  StrategyTable table = replay_strategy(net, scenario, vt, replay);
  nlohmann::json j = table.to_json(net);
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    input_check(out.good(), "cannot write strategy: " + o.out);
    out << j.dump(2) << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_inspect(const CliOptions& o) {
  Network net = load_network(o.network);
  nlohmann::json j;
  j["buses"] = net.num_buses();
  j["lines"] = net.num_lines();
  j["total_p_mw"] = net.total_p_load();
  std::vector<int> subs;
  for (int k : net.substation_bus_indices())
    subs.push_back(net.buses[static_cast<size_t>(k)].id);
  j["substations"] = subs;
  j["dispatchable"] = net.dispatchable_line_ids();
  j["initially_open_dispatchable"] = net.initial_open_dispatchable();
  j["content_hash"] = net.content_hash();

  std::vector<int> closed, none;
  for (const Line& l : net.lines)
    if (l.initially_closed) closed.push_back(l.id);
  j["initial_radial"] = is_radial(net, closed, none);
  Topology topo = energization(net, closed, none);
  j["initial_islanded_buses"] = topo.islanded_buses;

  if (!o.storm.empty()) {
    Scenario scenario = load_scenario(o.storm, net);
    nlohmann::json s;
    s["horizon"] = scenario.horizon;
    s["dt"] = scenario.dt;
    s["seed"] = scenario.seed;
    s["at_risk"] = nlohmann::json::object();
    for (int t = 1; t <= scenario.horizon; ++t) {
      const auto& slot = scenario.risks_at(t);
      if (slot.empty()) continue;
      nlohmann::json lines = nlohmann::json::array();
      for (const AtRiskLine& a : slot)
        lines.push_back({{"line", a.line},
                         {"name", net.line(a.line).name()},
                         {"p", a.p}});
      s["at_risk"][std::to_string(t)] = lines;
    }
    s["repairs"] = scenario.repair.size();
    j["storm"] = s;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_actions(const CliOptions& o) {
  Network net = load_network(o.network);
  MarkovState state = initial_state(net);
  if (!o.failed.empty()) {
    for (int id : parse_id_list(o.failed)) {
      net.line_index(id);  // id must exist
      state.failed.emplace_back(id, 1);
    }
  }
  // Remove failed lines from the initial open set so the state is canonical.
  std::vector<int> open;
  for (int id : state.open_dispatchable)
    if (!state.is_failed(id)) open.push_back(id);
  state.open_dispatchable = std::move(open);

  const std::vector<SwitchConfig>& actions = enumerate_actions(net, state);
  nlohmann::json j;
  j["failed"] = state.failed_ids();
  j["count"] = actions.size();
  j["actions"] = nlohmann::json::array();
  for (const SwitchConfig& a : actions) j["actions"].push_back(a.open_lines);
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Storm-resilient distribution reconfiguration toolkit"};
  app.require_subcommand(1);
  CliOptions o;

  auto add_network = [&o](CLI::App* cmd) {
    cmd->add_option("--network", o.network, "network JSON file")
        ->required();
  };
  auto add_storm = [&o](CLI::App* cmd) {
    cmd->add_option("--storm", o.storm, "storm scenario JSON file")->required();
  };

  CLI::App* train_cmd = app.add_subcommand("train", "fit a value table by forward simulation");
  add_network(train_cmd);
  add_storm(train_cmd);
  train_cmd->add_option("--iterations", o.iterations, "training iterations");
  train_cmd->add_option("--epsilon", o.epsilon,
                        "smoothing stepsize: constant like 0.1 or harmonic:20");
  train_cmd->add_option("--exploration", o.exploration,
                        "probability of a uniformly random action");
  train_cmd->add_option("--initial-value", o.initial_value,
                        "value-table default for unseen states");
  train_cmd->add_option("--seed", o.seed, "training seed (default: storm seed)")
      ->each([&o](const std::string&) { o.seed_given = true; });
  train_cmd->add_option("--probes", o.probes,
                        "post-decision states to trace each iteration");
  train_cmd->add_option("--trace", o.trace, "trace CSV output path");
  train_cmd->add_option("--out", o.out, "value table output (default values.json)");

  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Monte Carlo policy evaluation");
  add_network(eval_cmd);
  add_storm(eval_cmd);
  eval_cmd->add_option("--values", o.values, "trained value table")->required();
  eval_cmd->add_option("--paths", o.paths, "number of sampled storm paths");
  eval_cmd->add_option("--seed", o.seed, "evaluation seed (default: storm seed + 1)")
      ->each([&o](const std::string&) { o.seed_given = true; });
  eval_cmd->add_flag("--verify-replay", o.do_verify_replay,
                     "recompute every logged step cost and compare");
  eval_cmd->add_option("--out", o.out, "report JSON output path");

  CLI::App* dp_cmd = app.add_subcommand("exact-dp", "exact backward induction");
  add_network(dp_cmd);
  add_storm(dp_cmd);
  dp_cmd->add_option("--state-cap", o.state_cap, "reachable-state guard");
  dp_cmd->add_option("--out", o.out, "values JSON output path");

  CLI::App* strat_cmd = app.add_subcommand("strategy", "switching plan along a fixed realization");
  add_network(strat_cmd);
  add_storm(strat_cmd);
  strat_cmd->add_option("--values", o.values, "trained value table")->required();
  strat_cmd->add_option("--replay", o.replay, "fixed failure realization JSON")
      ->required();
  strat_cmd->add_option("--out", o.out, "strategy JSON output (default stdout)");

  CLI::App* inspect_cmd = app.add_subcommand("inspect", "summarize a network (and optional storm)");
  add_network(inspect_cmd);
  inspect_cmd->add_option("--storm", o.storm, "storm scenario JSON file");

  CLI::App* actions_cmd = app.add_subcommand("actions", "enumerate feasible switch configurations");
  add_network(actions_cmd);
  actions_cmd->add_option("--failed", o.failed,
                          "comma-separated failed line ids, e.g. 6,19");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(o);
    if (eval_cmd->parsed()) return cmd_evaluate(o);
    if (dp_cmd->parsed()) return cmd_exact_dp(o);
    if (strat_cmd->parsed()) return cmd_strategy(o);
    if (inspect_cmd->parsed()) return cmd_inspect(o);
    if (actions_cmd->parsed()) return cmd_actions(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace gridres
