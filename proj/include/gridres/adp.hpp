#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "gridres/dispatch.hpp"
#include "gridres/events.hpp"
#include "gridres/network.hpp"
#include "gridres/scenario.hpp"
#include "gridres/value_table.hpp"

namespace gridres {

// Smoothing stepsize: a constant ε, or the harmonic rule a/(a+n) where n is
// the entry's prior update count (so the first update replaces the default).
struct EpsilonSpec {
  bool harmonic = false;
  double value = 0.1;  // constant ε
  double a = 20.0;     // harmonic numerator

  static EpsilonSpec constant(double eps);
  static EpsilonSpec harmonic_rule(double a);
  // "0.1" or "harmonic:20".
  static EpsilonSpec parse(const std::string& text);

  double at(uint64_t prior_updates) const {
    return harmonic ? a / (a + static_cast<double>(prior_updates)) : value;
  }
  std::string str() const;
};

struct ADPConfig {
  int iterations = 1500;
  EpsilonSpec epsilon = EpsilonSpec::constant(0.1);
  double exploration = 0.0;   // ε-greedy action exploration; 0 = greedy only
  double initial_value = 0.0;
  uint64_t seed = 0;
  std::vector<PostDecisionState> probes;  // traced once per iteration

  void validate() const;  // InputError on out-of-range parameters
  nlohmann::json to_json() const;
};

// Shared cache of dispatch outcomes. The LP solution depends only on the
// failed set and the open set (loads are per-period constants and the shed
// penalty scales the objective without moving the argmin), so the cached
// shed quantity is period-independent and cost(t) = η_t·ΔT·shed + switch.
class CostOracle {
 public:
  explicit CostOracle(const Network& net);

  struct Cached {
    double shed_lp_mw = 0.0;        // optimal shed over the energized part
    double shed_islanded_mw = 0.0;  // load cut off from every substation
    double switch_cost = 0.0;       // Σ C_l over closed dispatchable lines
    bool feasible = true;

    double shed_mw() const { return shed_lp_mw + shed_islanded_mw; }
  };

  const Cached& lookup(const MarkovState& state, const SwitchConfig& action);
  double cost(const MarkovState& state, const SwitchConfig& action, double eta,
              double dt);
  CostBreakdown breakdown(const MarkovState& state, const SwitchConfig& action,
                          double eta, double dt);

  const Network& network() const { return net_; }
  size_t size() const;

 private:
  const Network& net_;
  mutable std::mutex mu_;
  std::unordered_map<LineMask,
                     std::unordered_map<LineMask, Cached, LineMask::Hash>,
                     LineMask::Hash>
      cache_;  // failed mask -> open mask -> entry
};

struct BellmanChoice {
  SwitchConfig action;
  double value = 0.0;  // min over actions of C_t + ṽ(post-decision)
  CostBreakdown cost;
  bool synthetic_total_outage = false;  // no feasible action existed
};

// Greedy one-period lookahead against the value table: evaluates every
// feasible action's immediate cost plus the post-decision estimate and
// returns the argmin (lexicographic open-list tie-break). When no action is
// feasible, returns the all-open configuration priced as total outage.
BellmanChoice bellman_action_select(const Network& net,
                                    const MarkovState& state,
                                    const ValueTable& vt,
                                    const Scenario& scenario,
                                    CostOracle* oracle = nullptr);

struct TraceRow {
  int iteration = 0;
  int probe = 0;  // index into config.probes
  double estimate = 0.0;
};

struct TrainResult {
  ValueTable table;
  std::vector<TraceRow> trace;
  std::vector<PostDecisionState> probes;  // echo of config.probes
  ValueTable::Header header;              // hashes + config echo
};

// Forward ADP: N sampled storm trajectories; at each period act greedily
// against the current table (with optional ε-greedy exploration), update the
// previous period's post-decision estimate with the newly observed value, and
// update the final period's estimate toward the terminal value 0.
TrainResult train(const Network& net, const Scenario& scenario,
                  const ADPConfig& config, CostOracle* oracle = nullptr);

void write_trace_csv(const TrainResult& result, const std::string& path);

}  // namespace gridres
