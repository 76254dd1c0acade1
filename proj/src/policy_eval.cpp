#include "gridres/policy_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <thread>

#include "gridres/common.hpp"
#include "gridres/events.hpp"

namespace gridres {

namespace {

int thread_count() {
  const char* env = std::getenv("GRIDRES_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n < 1 ? 1 : (n > 64 ? 64 : n);
}

std::vector<int> sorted_ids(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

PolicyEvalReport evaluate_policy(const Network& net, const Scenario& scenario,
                                 const ValueTable& vt, int paths,
                                 uint64_t seed, CostOracle* oracle) {
  input_check(paths >= 1, "evaluate_policy: need at least one path");
  scenario.validate(net);
  std::unique_ptr<CostOracle> local;
  if (!oracle) {
    local = std::make_unique<CostOracle>(net);
    oracle = local.get();
  }

  PolicyEvalReport rep;
  rep.paths = static_cast<uint64_t>(paths);
  rep.seed = seed;
  rep.shed_mwh_per_period.assign(static_cast<size_t>(scenario.horizon), 0.0);
  rep.path_logs.assign(static_cast<size_t>(paths), {});

  std::vector<uint64_t> misses(static_cast<size_t>(paths), 0);
  auto run_path = [&](int i) {
    RngStream rng(seed, static_cast<uint64_t>(i));
    MarkovState state = initial_state(net);
    PolicyEvalReport::PathLog& log = rep.path_logs[static_cast<size_t>(i)];
    log.path = i;
    for (int t = 1; t <= scenario.horizon; ++t) {
      BellmanChoice choice =
          bellman_action_select(net, state, vt, scenario, oracle);
      if (t < scenario.horizon &&
          !vt.find(post_decision(state, choice.action)))
        ++misses[static_cast<size_t>(i)];
      const double eta_dt = scenario.eta_at(t) * scenario.dt;
      PolicyEvalReport::Step step;
      step.t = t;
      step.failed = state.failed_ids();
      step.open = choice.action.open_lines;
      step.cost = choice.cost.total();
      step.shed_mw =
          (choice.cost.shed_cost_lp + choice.cost.shed_cost_islanded) / eta_dt;
      log.total_cost += step.cost;
      log.steps.push_back(std::move(step));
      if (t < scenario.horizon)
        state = sample_transition(net, state, choice.action, scenario, rng);
    }
  };

  const int workers = std::min(thread_count(), paths);
  if (workers <= 1) {
    for (int i = 0; i < paths; ++i) run_path(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < paths; i += workers) run_path(i);
      });
    for (std::thread& th : pool) th.join();
  }

  // Ordered reduction: identical totals no matter how many threads ran.
  double mean = 0.0;
  for (const auto& log : rep.path_logs) mean += log.total_cost;
  mean /= static_cast<double>(paths);
  double var = 0.0;
  for (const auto& log : rep.path_logs) {
    double d = log.total_cost - mean;
    var += d * d;
  }
  rep.mean_cost = mean;
  rep.std_error = paths > 1 ? std::sqrt(var / (paths - 1) / paths) : 0.0;
  for (uint64_t m : misses) rep.table_misses += m;
  for (const auto& log : rep.path_logs)
    for (const auto& step : log.steps)
      rep.shed_mwh_per_period[static_cast<size_t>(step.t - 1)] +=
          step.shed_mw * scenario.dt;
  for (double& v : rep.shed_mwh_per_period) v /= static_cast<double>(paths);
  return rep;
}

void verify_replay(const Network& net, const Scenario& scenario,
                   const PolicyEvalReport& report, CostOracle* oracle) {
  std::unique_ptr<CostOracle> local;
  if (!oracle) {
    local = std::make_unique<CostOracle>(net);
    oracle = local.get();
  }
  for (const auto& log : report.path_logs) {
    MarkovState state = initial_state(net);
    double total = 0.0;
    for (size_t s = 0; s < log.steps.size(); ++s) {
      const auto& step = log.steps[s];
      if (step.t != state.t || sorted_ids(step.failed) != state.failed_ids())
        throw NumericalError("replay: path " + std::to_string(log.path) +
                             " diverges at period " + std::to_string(step.t));
      SwitchConfig action{sorted_ids(step.open)};
      double cost =
          oracle->cost(state, action, scenario.eta_at(step.t), scenario.dt);
      if (std::abs(cost - step.cost) > 1e-9 * std::max(1.0, std::abs(cost)))
        throw NumericalError("replay: cost mismatch on path " +
                             std::to_string(log.path) + " period " +
                             std::to_string(step.t));
      total += cost;
      if (s + 1 < log.steps.size()) {
        // New failures are exactly the next step's failed set minus ours.
        std::vector<int> next_failed = sorted_ids(log.steps[s + 1].failed);
        std::vector<int> fresh;
        for (int id : next_failed)
          if (!state.is_failed(id)) fresh.push_back(id);
        MarkovState applied = state;
        applied.open_dispatchable = action.open_lines;
        state = markov_state_update(net, applied, fresh, scenario);
        if (state.failed_ids() != next_failed)
          throw NumericalError("replay: failure set on path " +
                               std::to_string(log.path) + " period " +
                               std::to_string(step.t + 1) +
                               " is unreachable from its predecessor");
      }
    }
    if (std::abs(total - log.total_cost) >
        1e-9 * std::max(1.0, std::abs(total)))
      throw NumericalError("replay: total cost mismatch on path " +
                           std::to_string(log.path));
  }
}

nlohmann::json PolicyEvalReport::to_json() const {
  nlohmann::json j;
  j["mean_cost"] = mean_cost;
  j["std_error"] = std_error;
  j["shed_mwh_per_period"] = shed_mwh_per_period;
  j["table_misses"] = table_misses;
  j["paths"] = paths;
  j["seed"] = seed;
  j["path_logs"] = nlohmann::json::array();
  for (const auto& log : path_logs) {
    nlohmann::json jl;
    jl["path"] = log.path;
    jl["total_cost"] = log.total_cost;
    jl["steps"] = nlohmann::json::array();
    for (const auto& s : log.steps) {
      jl["steps"].push_back({{"t", s.t},
                             {"failed", s.failed},
                             {"open", s.open},
                             {"cost", s.cost},
                             {"shed_mw", s.shed_mw}});
    }
    j["path_logs"].push_back(std::move(jl));
  }
  return j;
}

PolicyEvalReport PolicyEvalReport::from_json(const nlohmann::json& j) {
  PolicyEvalReport rep;
  rep.mean_cost = j.value("mean_cost", 0.0);
  rep.std_error = j.value("std_error", 0.0);
  if (j.contains("shed_mwh_per_period"))
    rep.shed_mwh_per_period =
        j["shed_mwh_per_period"].get<std::vector<double>>();
  rep.table_misses = j.value("table_misses", uint64_t{0});
  rep.paths = j.value("paths", uint64_t{0});
  rep.seed = j.value("seed", uint64_t{0});
  if (j.contains("path_logs")) {
    for (const auto& jl : j["path_logs"]) {
      PathLog log;
      log.path = jl.value("path", 0);
      log.total_cost = jl.value("total_cost", 0.0);
      if (jl.contains("steps")) {
        for (const auto& js : jl["steps"]) {
          Step s;
          s.t = js.value("t", 1);
          if (js.contains("failed")) s.failed = js["failed"].get<std::vector<int>>();
          if (js.contains("open")) s.open = js["open"].get<std::vector<int>>();
          s.cost = js.value("cost", 0.0);
          s.shed_mw = js.value("shed_mw", 0.0);
          log.steps.push_back(std::move(s));
        }
      }
      rep.path_logs.push_back(std::move(log));
    }
  }
  return rep;
}

void write_report_json(const PolicyEvalReport& report, const std::string& path) {
  std::ofstream out(path);
  input_check(out.good(), "cannot write report: " + path);
  out << report.to_json().dump(2) << "\n";
}

}  // namespace gridres
