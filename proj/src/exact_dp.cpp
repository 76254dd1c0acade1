#include "gridres/exact_dp.hpp"

#include <cmath>
#include <fstream>
#include <memory>

#include "gridres/actions.hpp"
#include "gridres/common.hpp"

namespace gridres {

namespace {

struct DpContext {
  const Network& net;
  const Scenario& scenario;
  CostOracle* oracle;
  uint64_t cap;
  DpResult out;

  double state_value(const MarkovState& state);
  double pds_value(const MarkovState& state, const SwitchConfig& action);
  void record_pds(const PostDecisionState& pds, double v);
};

void DpContext::record_pds(const PostDecisionState& pds, double v) {
  auto [it, inserted] = out.pds_values.emplace(pds.encode(), v);
  if (!inserted && std::abs(it->second - v) > 1e-9)
    out.pds_alias_conflict = true;  // two repair histories share this key
}

double DpContext::pds_value(const MarkovState& state,
                            const SwitchConfig& action) {
  double v = 0.0;
  for (const Transition& tr :
       enumerate_successors(net, state, action, scenario))
    v += tr.probability * state_value(tr.successor);
  record_pds(post_decision(state, action), v);
  return v;
}

double DpContext::state_value(const MarkovState& state) {
  const std::string key = state.encode();
  if (auto it = out.state_values.find(key); it != out.state_values.end())
    return it->second;
  if (++out.state_count > cap)
    throw InputError("exact_dp: reachable state count exceeds " +
                     std::to_string(cap));

  const double eta = scenario.eta_at(state.t);
  const double dt = scenario.dt;
  const bool terminal = state.t == scenario.horizon;
  const std::vector<SwitchConfig>& actions = enumerate_actions(net, state);

  double best = kInf;
  SwitchConfig best_action;
  if (actions.empty()) {
    for (int id : net.dispatchable_line_ids())
      if (!state.is_failed(id)) best_action.open_lines.push_back(id);
    best = eta * dt * net.total_p_load();
    if (!terminal) best += pds_value(state, best_action);
    else record_pds(post_decision(state, best_action), 0.0);
  } else {
    for (const SwitchConfig& a : actions) {
      double v = oracle->cost(state, a, eta, dt);
      if (terminal)
        record_pds(post_decision(state, a), 0.0);
      else
        v += pds_value(state, a);
      if (v < best) {  // lexicographic winner among exact ties
        best = v;
        best_action = a;
      }
    }
  }
  out.state_values.emplace(key, best);
  out.policy.emplace(key, std::move(best_action));
  return best;
}

}  // namespace

double DpResult::root_value() const {
  for (const auto& [key, v] : state_values)
    if (key.rfind("t1|", 0) == 0) return v;
  throw NumericalError("exact_dp result holds no initial-period state");
}

nlohmann::json DpResult::to_json() const {
  nlohmann::json j;
  j["state_count"] = state_count;
  j["pds_alias_conflict"] = pds_alias_conflict;
  j["root_value"] = root_value();
  j["states"] = nlohmann::json::object();
  for (const auto& [k, v] : state_values) j["states"][k] = v;
  j["pds"] = nlohmann::json::object();
  for (const auto& [k, v] : pds_values) j["pds"][k] = v;
  j["policy"] = nlohmann::json::object();
  for (const auto& [k, a] : policy) j["policy"][k] = a.open_lines;
  return j;
}

DpResult exact_dp(const Network& net, const Scenario& scenario,
                  CostOracle* oracle, uint64_t state_cap) {
  scenario.validate(net);
  std::unique_ptr<CostOracle> local;
  if (!oracle) {
    local = std::make_unique<CostOracle>(net);
    oracle = local.get();
  }
  DpContext ctx{net, scenario, oracle, state_cap, {}};
  ctx.state_value(initial_state(net));
  return std::move(ctx.out);
}

void write_dp_values_json(const DpResult& dp, const std::string& path) {
  std::ofstream out(path);
  input_check(out.good(), "cannot write DP values: " + path);
  out << dp.to_json().dump(2) << "\n";
}

}  // namespace gridres
