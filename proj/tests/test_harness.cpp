#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gridres/adp.hpp"
#include "gridres/case_study.hpp"
#include "gridres/network.hpp"
#include "gridres/policy_eval.hpp"
#include "gridres/scenario.hpp"
#include "gridres/value_table.hpp"

using namespace gridres;

namespace {

const std::string kData = GRIDRES_DATA_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool reports_equal(const PolicyEvalReport& a, const PolicyEvalReport& b) {
  if (a.mean_cost != b.mean_cost || a.std_error != b.std_error ||
      a.paths != b.paths || a.table_misses != b.table_misses)
    return false;
  if (a.path_logs.size() != b.path_logs.size()) return false;
  for (size_t i = 0; i < a.path_logs.size(); ++i) {
    if (a.path_logs[i].total_cost != b.path_logs[i].total_cost) return false;
    if (a.path_logs[i].steps.size() != b.path_logs[i].steps.size())
      return false;
    for (size_t k = 0; k < a.path_logs[i].steps.size(); ++k) {
      const auto& sa = a.path_logs[i].steps[k];
      const auto& sb = b.path_logs[i].steps[k];
      if (sa.t != sb.t || sa.failed != sb.failed || sa.open != sb.open ||
          sa.cost != sb.cost || sa.shed_mw != sb.shed_mw)
        return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("policy evaluation is deterministic and thread-count invariant") {
  Network net = load_network(kData + "/toy6b.json");
  Scenario storm = load_scenario(kData + "/toy6b_storm.json", net);
  CostOracle oracle(net);
  ValueTable myopic;  // empty table = pure immediate-cost policy

  setenv("GRIDRES_THREADS", "1", 1);
  auto r1 = evaluate_policy(net, storm, myopic, 60, 77, &oracle);
  auto r2 = evaluate_policy(net, storm, myopic, 60, 77, &oracle);
  setenv("GRIDRES_THREADS", "4", 1);
  auto r4 = evaluate_policy(net, storm, myopic, 60, 77, &oracle);
  unsetenv("GRIDRES_THREADS");

  CHECK(r1.paths == 60);
  CHECK(reports_equal(r1, r2));
  CHECK(reports_equal(r1, r4));
  CHECK(r1.mean_cost > 0.0);  // the bundled storm really does damage
  REQUIRE(r1.path_logs.size() == 60);
  CHECK(r1.table_misses > 0);  // nothing in the table to hit

  // A different seed draws different storms.
  auto r_other = evaluate_policy(net, storm, myopic, 60, 78, &oracle);
  CHECK(r_other.mean_cost != r1.mean_cost);
}

TEST_CASE("per-path logs replay exactly and tampering is caught") {
  Network net = load_network(kData + "/toy6a.json");
  Scenario storm = load_scenario(kData + "/toy6a_storm.json", net);
  CostOracle oracle(net);
  ValueTable vt;
  auto report = evaluate_policy(net, storm, vt, 40, 5, &oracle);
  verify_replay(net, storm, report, &oracle);  // must not throw

  auto broken = report;
  REQUIRE(!broken.path_logs.empty());
  REQUIRE(!broken.path_logs[0].steps.empty());
  broken.path_logs[0].steps[0].cost += 0.5;
  CHECK_THROWS_AS(verify_replay(net, storm, broken, &oracle), NumericalError);

  auto broken2 = report;
  broken2.path_logs[0].total_cost += 1.0;
  CHECK_THROWS_AS(verify_replay(net, storm, broken2, &oracle), NumericalError);
}

TEST_CASE("evaluation reports round-trip through JSON") {
  Network net = load_network(kData + "/toy4.json");
  Scenario storm = load_scenario(kData + "/toy4_storm.json", net);
  ValueTable vt;
  auto report = evaluate_policy(net, storm, vt, 10, 3);
  auto back = PolicyEvalReport::from_json(report.to_json());
  CHECK(reports_equal(report, back));
  const std::string path = "/tmp/gridres_test_report.json";
  write_report_json(report, path);
  std::ifstream in(path);
  nlohmann::json j;
  in >> j;
  CHECK(reports_equal(report, PolicyEvalReport::from_json(j)));
  std::filesystem::remove(path);
}

TEST_CASE("value tables round-trip with their headers") {
  ValueTable vt;
  vt.default_value = 2.5;
  value_update(vt, PostDecisionState::decode("t1|f|o3.6"), 42.125, 1.0);
  value_update(vt, PostDecisionState::decode("t2|f1|o6"), -3.0, 1.0);
  value_update(vt, PostDecisionState::decode("t2|f1|o6"), 5.0, 0.5);
  ValueTable::Header header;
  header.network_hash = 0xabcdef0011223344ull;
  header.scenario_hash = 17;
  header.config = {{"iterations", 9}};

  const std::string path = "/tmp/gridres_test_values.json";
  save_value_table(vt, header, path);
  ValueTable::Header back_header;
  ValueTable back = load_value_table(path, &back_header);
  std::filesystem::remove(path);

  CHECK(back.default_value == 2.5);
  CHECK(back_header.network_hash == header.network_hash);
  CHECK(back_header.scenario_hash == header.scenario_hash);
  CHECK(back_header.config["iterations"].get<int>() == 9);
  REQUIRE(back.size() == 2);
  auto* e = back.find(PostDecisionState::decode("t2|f1|o6"));
  REQUIRE(e != nullptr);
  CHECK(e->value == 1.0);  // (1-.5)*(-3) + .5*5
  CHECK(e->visits == 2);
}

TEST_CASE("replay strategies walk the bundled realization") {
  Network net = load_network(kData + "/ieee33.json");
  Scenario storm = load_scenario(kData + "/ieee33_storm.json", net);
  CostOracle oracle(net);
  Replay replay = Replay::load(kData + "/ieee33_replay.json", storm);
  ValueTable vt;
  StrategyTable strategy = replay_strategy(net, storm, vt, replay, &oracle);
  REQUIRE(strategy.rows.size() == static_cast<size_t>(storm.horizon));
  CHECK(strategy.rows[0].period == 1);
  CHECK(strategy.rows[0].observed_failures.empty());
  CHECK(strategy.rows[1].observed_failures == std::vector<int>{6});
  for (const auto& row : strategy.rows) {
    for (int id : row.opened) CHECK(net.line(id).dispatchable);
    for (int id : row.closed) CHECK(net.line(id).dispatchable);
  }
  auto j = strategy.to_json(net);
  REQUIRE(j.contains("rows"));
  CHECK(j["rows"].size() == strategy.rows.size());

  // Replays must respect at-risk windows.
  const std::string bad_path = "/tmp/gridres_test_bad_replay.json";
  {
    std::ofstream out(bad_path);
    out << R"({"periods":[{"t":2,"failures":[30]}]})";  // 30 at risk in t=5
  }
  CHECK_THROWS_AS(Replay::load(bad_path, storm), InputError);
  std::filesystem::remove(bad_path);
}

TEST_CASE("case studies produce byte-identical artifacts on reruns") {
  namespace fs = std::filesystem;
  CaseOverrides ov;
  ov.iterations = 40;
  ov.epsilon = EpsilonSpec::parse("harmonic:1");
  ov.exploration = 0.25;
  ov.seed = 9;
  ov.eval_paths = 25;

  Network net = load_network(kData + "/toy6a.json");
  CostOracle oracle(net);
  auto run_a = run_case_study("toy6a", ov, kData, &oracle);
  auto run_b = run_case_study("toy6a", ov, kData, &oracle);

  CHECK(run_a.report.paths == 25);
  CHECK(run_a.training.table.size() > 0);
  CHECK(reports_equal(run_a.report, run_b.report));
  verify_replay(run_a.net, run_a.scenario, run_a.report, &oracle);

  const std::string dir_a = "/tmp/gridres_test_case_a";
  const std::string dir_b = "/tmp/gridres_test_case_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  write_case_outputs(run_a, dir_a);
  write_case_outputs(run_b, dir_b);
  for (const char* f :
       {"trace.csv", "strategy.json", "report.json", "values.json"}) {
    CAPTURE(f);
    CHECK(slurp(dir_a + "/" + f) == slurp(dir_b + "/" + f));
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("case studies honor overrides") {
  CaseOverrides ov;
  ov.iterations = 30;
  ov.failure_rate = 0.0;  // storms never strike
  ov.eval_paths = 10;
  ov.seed = 4;
  auto result = run_case_study("toy6b", ov, kData);
  // With zero failure probability every path is quiet and costs nothing:
  // the intact toy6b configuration serves all load switch-free.
  CHECK(result.report.mean_cost == 0.0);
  for (const auto& slot : result.scenario.at_risk)
    for (const auto& risk : slot) CHECK(risk.p == 0.0);

  CaseOverrides bad;
  bad.failure_rate = 1.5;
  CHECK_THROWS_AS(run_case_study("toy6b", bad, kData), InputError);
}

TEST_CASE("bundled probe files decode") {
  auto probes = load_probes(kData + "/ieee33_probes.json");
  REQUIRE(probes.size() == 5);
  CHECK(probes[0].encode() == "t1|f|o10.12.33.36.37");
  auto probes123 = load_probes(kData + "/ieee123_probes.json");
  REQUIRE(probes123.size() == 2);
  CHECK(probes123[0].t == 1);
}
