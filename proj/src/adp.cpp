#include "gridres/adp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "gridres/actions.hpp"
#include "gridres/common.hpp"

namespace gridres {

EpsilonSpec EpsilonSpec::constant(double eps) {
  EpsilonSpec s;
  s.harmonic = false;
  s.value = eps;
  return s;
}

EpsilonSpec EpsilonSpec::harmonic_rule(double a) {
  EpsilonSpec s;
  s.harmonic = true;
  s.a = a;
  return s;
}

EpsilonSpec EpsilonSpec::parse(const std::string& text) {
  if (text.rfind("harmonic:", 0) == 0) {
    double a = 0.0;
    try {
      a = std::stod(text.substr(9));
    } catch (const std::exception&) {
      throw InputError("epsilon: cannot parse harmonic numerator in '" + text +
                       "'");
    }
    input_check(a > 0 && std::isfinite(a),
                "epsilon: harmonic numerator must be positive in '" + text +
                    "'");
    return harmonic_rule(a);
  }
  try {
    size_t used = 0;
    double v = std::stod(text, &used);
    input_check(used == text.size(), "epsilon: trailing characters in '" + text +
                                         "'");
    input_check(v > 0 && v <= 1.0,
                "epsilon: constant value must lie in (0, 1], got '" + text +
                    "'");
    return constant(v);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception&) {
    throw InputError("epsilon: cannot parse '" + text +
                     "' (expected e.g. '0.1' or 'harmonic:20')");
  }
}

std::string EpsilonSpec::str() const {
  char buf[64];
  if (harmonic)
    std::snprintf(buf, sizeof buf, "harmonic:%g", a);
  else
    std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

void ADPConfig::validate() const {
  input_check(iterations >= 1, "adp: iterations must be >= 1");
  if (epsilon.harmonic)
    input_check(epsilon.a > 0 && std::isfinite(epsilon.a),
                "adp: harmonic numerator must be positive");
  else
    input_check(epsilon.value > 0 && epsilon.value <= 1.0,
                "adp: constant epsilon must lie in (0, 1]");
  input_check(exploration >= 0.0 && exploration <= 1.0,
              "adp: exploration must lie in [0, 1]");
  input_check(std::isfinite(initial_value), "adp: initial value must be finite");
}

nlohmann::json ADPConfig::to_json() const {
  nlohmann::json j;
  j["iterations"] = iterations;
  j["epsilon"] = epsilon.str();
  j["exploration"] = exploration;
  j["initial_value"] = initial_value;
  j["seed"] = seed;
  j["probes"] = nlohmann::json::array();
  for (const PostDecisionState& p : probes) j["probes"].push_back(p.encode());
  return j;
}

CostOracle::CostOracle(const Network& net) : net_(net) {}

const CostOracle::Cached& CostOracle::lookup(const MarkovState& state,
                                             const SwitchConfig& action) {
  const LineMask failed = net_.mask_of_ids(state.failed_ids());
  const LineMask open = net_.mask_of_ids(action.open_lines);
  {
    std::lock_guard lock(mu_);
    auto outer = cache_.find(failed);
    if (outer != cache_.end()) {
      auto inner = outer->second.find(open);
      if (inner != outer->second.end()) return inner->second;
    }
  }

  // Solve outside the lock; a racing duplicate computes the same numbers and
  // the first insert wins. Unit eta/dt make the cached sheds plain megawatts.
  DispatchCase c = make_dispatch_case(net_, Topology{}, state.t, 1.0, 1.0);
  auto [cost, res] = immediate_cost(net_, state, action, c);
  Cached entry;
  entry.shed_lp_mw = res.breakdown.shed_cost_lp;
  entry.shed_islanded_mw = res.breakdown.shed_cost_islanded;
  entry.switch_cost = res.breakdown.switch_cost;
  entry.feasible = res.feasible;

  std::lock_guard lock(mu_);
  return cache_[failed].try_emplace(open, entry).first->second;
}

double CostOracle::cost(const MarkovState& state, const SwitchConfig& action,
                        double eta, double dt) {
  const Cached& c = lookup(state, action);
  return eta * dt * c.shed_mw() + c.switch_cost;
}

CostBreakdown CostOracle::breakdown(const MarkovState& state,
                                    const SwitchConfig& action, double eta,
                                    double dt) {
  const Cached& c = lookup(state, action);
  CostBreakdown b;
  b.shed_cost_lp = eta * dt * c.shed_lp_mw;
  b.shed_cost_islanded = eta * dt * c.shed_islanded_mw;
  b.switch_cost = c.switch_cost;
  return b;
}

size_t CostOracle::size() const {
  std::lock_guard lock(mu_);
  size_t n = 0;
  for (const auto& [mask, inner] : cache_) n += inner.size();
  return n;
}

BellmanChoice bellman_action_select(const Network& net,
                                    const MarkovState& state,
                                    const ValueTable& vt,
                                    const Scenario& scenario,
                                    CostOracle* oracle) {
  input_check(state.t >= 1 && state.t <= scenario.horizon,
              "action selection: period outside the scenario horizon");
  const double eta = scenario.eta_at(state.t);
  const double dt = scenario.dt;
  const bool terminal = state.t == scenario.horizon;
  const std::vector<SwitchConfig>& actions = enumerate_actions(net, state);

  if (actions.empty()) {
    // No radial configuration exists: everything sheds, switches all open.
    BellmanChoice out;
    out.synthetic_total_outage = true;
    for (int id : net.dispatchable_line_ids())
      if (!state.is_failed(id)) out.action.open_lines.push_back(id);
    out.cost.shed_cost_islanded = eta * dt * net.total_p_load();
    double cont = terminal ? 0.0 : vt.value(post_decision(state, out.action));
    out.value = out.cost.total() + cont;
    return out;
  }

  DispatchCase direct;  // only used when no oracle caches the dispatches
  if (!oracle) direct = make_dispatch_case(net, Topology{}, state.t, eta, dt);

  BellmanChoice out;
  out.value = kInf;
  for (const SwitchConfig& a : actions) {
    CostBreakdown cb;
    if (oracle) {
      cb = oracle->breakdown(state, a, eta, dt);
    } else {
      cb = immediate_cost(net, state, a, direct).second.breakdown;
    }
    double cont = terminal ? 0.0 : vt.value(post_decision(state, a));
    double v = cb.total() + cont;
    // Strict comparison + lexicographic enumeration order = deterministic
    // lowest-open-list winner among exact ties.
    if (v < out.value) {
      out.value = v;
      out.action = a;
      out.cost = cb;
    }
  }
  return out;
}

TrainResult train(const Network& net, const Scenario& scenario,
                  const ADPConfig& config, CostOracle* oracle) {
  config.validate();
  scenario.validate(net);

  std::unique_ptr<CostOracle> local;
  if (!oracle) {
    local = std::make_unique<CostOracle>(net);
    oracle = local.get();
  }

  TrainResult result;
  result.probes = config.probes;
  result.header.network_hash = net.content_hash();
  result.header.scenario_hash = scenario.content_hash();
  result.header.config = config.to_json();
  ValueTable& vt = result.table;
  vt.default_value = config.initial_value;
  result.trace.reserve(static_cast<size_t>(config.iterations) *
                       config.probes.size());

  auto smooth = [&](const PostDecisionState& pds, double observed) {
    uint64_t prior = vt.touch(pds).visits;
    value_update(vt, pds, observed, config.epsilon.at(prior));
  };

  for (int n = 1; n <= config.iterations; ++n) {
    RngStream rng(config.seed, static_cast<uint64_t>(n));
    MarkovState state = initial_state(net);
    std::optional<PostDecisionState> prev;

    for (int t = 1; t <= scenario.horizon; ++t) {
      BellmanChoice choice = bellman_action_select(net, state, vt, scenario,
                                                   oracle);
      if (prev) smooth(*prev, choice.value);

      SwitchConfig applied = choice.action;
      if (config.exploration > 0 && rng.uniform() < config.exploration) {
        const auto& actions = enumerate_actions(net, state);
        if (!actions.empty())
          applied = actions[rng.uniform_int(
              static_cast<uint32_t>(actions.size()))];
      }

      PostDecisionState pds = post_decision(state, applied);
      if (t == scenario.horizon) {
        smooth(pds, 0.0);  // beyond the horizon nothing is shed or switched
      } else {
        state = sample_transition(net, state, applied, scenario, rng);
        prev = pds;
      }
    }

    for (size_t p = 0; p < config.probes.size(); ++p)
      result.trace.push_back(
          {n, static_cast<int>(p), vt.value(config.probes[p])});
  }
  return result;
}

void write_trace_csv(const TrainResult& result, const std::string& path) {
  std::ofstream out(path);
  input_check(out.good(), "cannot write trace: " + path);
  out << "iteration,probe,pds,estimate\n";
  char buf[64];
  for (const TraceRow& row : result.trace) {
    std::snprintf(buf, sizeof buf, "%.17g", row.estimate);
    out << row.iteration << ',' << row.probe << ','
        << result.probes[static_cast<size_t>(row.probe)].encode() << ',' << buf
        << "\n";
  }
}

}  // namespace gridres
