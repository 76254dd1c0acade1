#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "gridres/lp.hpp"
#include "gridres/network.hpp"
#include "gridres/state.hpp"
#include "gridres/topology.hpp"

namespace gridres {

// One load-shedding dispatch problem: a period's topology, shedding penalty,
// duration, and per-bus loads (MW, MVAr), indexed like net.buses.
struct DispatchCase {
  Topology topology;
  int period = 1;
  double eta = 1000.0;  // $/MWh
  double dt = 1.0;      // hours
  std::vector<std::pair<double, double>> loads;
};

// Loads default to the network's per-period demands.
DispatchCase make_dispatch_case(const Network& net, Topology topology,
                                int period, double eta, double dt);

struct CostBreakdown {
  double shed_cost_lp = 0.0;        // η·ΔT · Σ connected shed
  double shed_cost_islanded = 0.0;  // η·ΔT · Σ islanded load
  double switch_cost = 0.0;         // Σ C_l over closed dispatchable lines
  double total() const { return shed_cost_lp + shed_cost_islanded + switch_cost; }
};

struct DispatchResult {
  std::vector<double> shed_p;  // per bus (net order), MW; islanded = full load
  std::vector<double> shed_q;  // per bus, MVAr (proportional to shed_p)
  std::vector<std::pair<double, double>> flows;  // per line (F^p, F^q); 0 if open
  std::vector<double> voltages_sq;  // per bus U; 0 for islanded buses
  CostBreakdown breakdown;
  double cost = 0.0;  // breakdown.total()
  bool feasible = false;
  // Closed lines whose LP flows violate the exact quadratic capacity
  // (F^p)^2+(F^q)^2 <= (F^s)^2 — possible under the octagonal relaxation by up
  // to a factor 2 in the square; flagged, never rejected.
  std::vector<int> quadratic_capacity_flags;

  nlohmann::json to_json(const Network& net) const;
};

// Linearized-DistFlow shedding LP over the energized part of the topology:
// power balance with shed variables per load bus (reactive shed proportional),
// voltage-drop rows with big-M relaxation for open lines, octagonal capacity
// cuts, squared voltage bounds, substation voltage fixed at 1. Throws
// InputError if the topology is not radial.
LinearProgram build_dispatch_lp(const Network& net, const DispatchCase& c);

// Immediate period cost of (state, action): LP shedding cost + full shedding
// of islanded buses + switch operating cost of closed dispatchable lines.
// The topology is derived from (state, action); `c` supplies period, eta, dt
// and loads. Throws NumericalError if the LP fails.
std::pair<double, DispatchResult> immediate_cost(const Network& net,
                                                 const MarkovState& state,
                                                 const SwitchConfig& action,
                                                 const DispatchCase& c);

}  // namespace gridres
