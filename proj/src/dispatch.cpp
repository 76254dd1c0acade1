#include "gridres/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "gridres/common.hpp"

namespace gridres {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSnapTol = 1e-11;  // flow/shed magnitudes below this print as 0

// Big-M for the voltage-drop relaxation on open lines: wide enough to cover
// any reachable difference of squared voltages, but finite so the LP stays
// bounded and well-scaled.
double voltage_big_m(const Network& net) {
  double umax = 0.0, umin = kInf, drop = 0.0;
  for (const Bus& b : net.buses) {
    umax = std::max(umax, b.v_max * b.v_max);
    umin = std::min(umin, b.v_min * b.v_min);
  }
  // Flows are in MW/MVAr while impedances are per-unit, so every drop term
  // carries a 1/base_mva.
  for (const Line& l : net.lines)
    drop += 2.0 * (l.r + l.x) * l.s_max / net.base_mva;
  return umax - umin + drop;
}

void validate_dispatch_case(const Network& net, const DispatchCase& c) {
  input_check(c.loads.size() == net.buses.size(),
              "dispatch: loads must have one (P, Q) pair per bus");
  input_check(c.eta > 0 && std::isfinite(c.eta),
              "dispatch: shedding penalty must be positive");
  input_check(c.dt > 0 && std::isfinite(c.dt),
              "dispatch: period length must be positive");
  for (size_t k = 0; k < net.buses.size(); ++k) {
    const auto& [p, q] = c.loads[k];
    input_check(p >= 0 && std::isfinite(p) && std::isfinite(q),
                "dispatch: bus load must be finite with P >= 0");
    input_check(std::abs(q) <= 10.0 * p + 1e-12,
                "dispatch: reactive load out of proportion at bus " +
                    std::to_string(net.buses[k].id));
    if (net.buses[k].is_substation)
      input_check(p == 0 && std::abs(q) <= 1e-12,
                  "dispatch: substation buses carry no load");
  }
}

// The shed-free dispatch of a radial energized forest is fully determined:
// tree flows are the downstream load sums and voltages follow from the drop
// equations and the substation pin. When that point satisfies every voltage
// bound and octagonal capacity cut it is the unique LP optimum (shed is
// priced positive), so the simplex can be skipped. Returns false — leaving
// `r` untouched — whenever any bound is violated or the topology is not
// radial; the LP then arbitrates.
bool try_zero_shed(const Network& net, const DispatchCase& c,
                   DispatchResult* r, double* shed_total_mw) {
  if (!is_radial(net, c.topology.closed_lines, {})) return false;
  const double tol = 1e-9;
  const size_t nb = net.buses.size();
  const size_t nl = net.lines.size();

  std::vector<char> energized(nb, 0);
  for (int id : c.topology.energized_buses)
    energized[static_cast<size_t>(net.bus_index(id))] = 1;

  // Adjacency over effectively closed energized lines (the set that carries
  // flow variables in the LP formulation).
  std::vector<char> closed(nl, 0);
  for (int id : c.topology.closed_lines)
    closed[static_cast<size_t>(net.line_index(id))] = 1;
  std::vector<std::vector<int>> adj(nb);
  for (size_t li = 0; li < nl; ++li) {
    if (!closed[li]) continue;
    const Line& l = net.lines[li];
    size_t f = static_cast<size_t>(net.bus_index(l.from_bus));
    if (!energized[f]) continue;
    adj[f].push_back(static_cast<int>(li));
    adj[static_cast<size_t>(net.bus_index(l.to_bus))].push_back(
        static_cast<int>(li));
  }

  // Forest order from the substations; parent_line[k] identifies the edge
  // toward the root.
  std::vector<int> order;
  order.reserve(nb);
  std::vector<int> parent_line(nb, -1);
  std::vector<char> seen(nb, 0);
  for (int si : net.substation_bus_indices()) {
    if (seen[static_cast<size_t>(si)]) continue;
    seen[static_cast<size_t>(si)] = 1;
    size_t head = order.size();
    order.push_back(si);
    while (head < order.size()) {
      int k = order[head++];
      for (int li : adj[static_cast<size_t>(k)]) {
        const Line& l = net.lines[static_cast<size_t>(li)];
        int other = net.bus_index(l.from_bus) == k
                        ? net.bus_index(l.to_bus)
                        : net.bus_index(l.from_bus);
        if (seen[static_cast<size_t>(other)]) continue;
        seen[static_cast<size_t>(other)] = 1;
        parent_line[static_cast<size_t>(other)] = li;
        order.push_back(other);
      }
    }
  }

  // Downstream load sums, leaves first, give the from->to oriented flows.
  std::vector<double> sub_p(nb, 0.0), sub_q(nb, 0.0);
  std::vector<double> fp(nl, 0.0), fq(nl, 0.0);
  for (size_t i = order.size(); i-- > 0;) {
    size_t k = static_cast<size_t>(order[i]);
    sub_p[k] += c.loads[k].first;
    sub_q[k] += c.loads[k].second;
    int li = parent_line[k];
    if (li < 0) continue;
    const Line& l = net.lines[static_cast<size_t>(li)];
    size_t to = static_cast<size_t>(net.bus_index(l.to_bus));
    double sign = to == k ? 1.0 : -1.0;
    fp[static_cast<size_t>(li)] = sign * sub_p[k];
    fq[static_cast<size_t>(li)] = sign * sub_q[k];
    size_t parent = to == k ? static_cast<size_t>(net.bus_index(l.from_bus)) : to;
    sub_p[parent] += sub_p[k];
    sub_q[parent] += sub_q[k];
  }

  for (size_t li = 0; li < nl; ++li) {
    if (!closed[li]) continue;
    const Line& l = net.lines[li];
    if (!energized[static_cast<size_t>(net.bus_index(l.from_bus))]) continue;
    double cap = l.s_max + tol;
    double diag = kSqrt2 * l.s_max + tol;
    if (std::abs(fp[li]) > cap || std::abs(fq[li]) > cap ||
        std::abs(fp[li] + fq[li]) > diag || std::abs(fp[li] - fq[li]) > diag)
      return false;
  }

  // Root-to-leaf voltage sweep; U_from - U_to = 2(r Fp + x Fq)/base.
  std::vector<double> u(nb, 0.0);
  for (int k : order) {
    size_t kk = static_cast<size_t>(k);
    const Bus& b = net.buses[kk];
    int li = parent_line[kk];
    if (li < 0) {
      u[kk] = 1.0;
    } else {
      const Line& l = net.lines[static_cast<size_t>(li)];
      double drop = 2.0 * (l.r * fp[static_cast<size_t>(li)] +
                           l.x * fq[static_cast<size_t>(li)]) /
                    net.base_mva;
      size_t to = static_cast<size_t>(net.bus_index(l.to_bus));
      size_t parent =
          to == kk ? static_cast<size_t>(net.bus_index(l.from_bus)) : to;
      u[kk] = to == kk ? u[parent] - drop : u[parent] + drop;
    }
    if (!b.is_substation &&
        (u[kk] < b.v_min * b.v_min - tol || u[kk] > b.v_max * b.v_max + tol))
      return false;
  }

  for (int k : order) {
    size_t kk = static_cast<size_t>(k);
    r->voltages_sq[kk] = u[kk];
  }
  for (size_t li = 0; li < nl; ++li) {
    if (fp[li] == 0.0 && fq[li] == 0.0) continue;
    double a = std::abs(fp[li]) < kSnapTol ? 0.0 : fp[li];
    double b = std::abs(fq[li]) < kSnapTol ? 0.0 : fq[li];
    r->flows[li] = {a, b};
    const Line& l = net.lines[li];
    if (a * a + b * b > l.s_max * l.s_max * (1.0 + 1e-9))
      r->quadratic_capacity_flags.push_back(l.id);
  }
  *shed_total_mw = 0.0;
  return true;
}

}  // namespace

DispatchCase make_dispatch_case(const Network& net, Topology topology,
                                int period, double eta, double dt) {
  DispatchCase c;
  c.topology = std::move(topology);
  c.period = period;
  c.eta = eta;
  c.dt = dt;
  c.loads.reserve(net.buses.size());
  for (const Bus& b : net.buses) c.loads.emplace_back(b.p_load, b.q_load);
  return c;
}

LinearProgram build_dispatch_lp(const Network& net, const DispatchCase& c) {
  validate_dispatch_case(net, c);
  input_check(is_radial(net, c.topology.closed_lines, {}),
              "dispatch: topology is not radial");

  LinearProgram lp;
  const double big_m = voltage_big_m(net);
  const double shed_price = c.eta * c.dt;

  // Squared-voltage variable per energized bus; substations pinned at 1.
  std::vector<int> u_var(net.buses.size(), -1);
  for (size_t k = 0; k < net.buses.size(); ++k) {
    const Bus& b = net.buses[k];
    if (!c.topology.is_energized(b.id)) continue;
    double lo = b.is_substation ? 1.0 : b.v_min * b.v_min;
    double hi = b.is_substation ? 1.0 : b.v_max * b.v_max;
    u_var[k] = lp.add_var(lo, hi, 0.0, "U_" + std::to_string(b.id));
    lp.start_hint.back() =
        std::abs(hi - 1.0) <= std::abs(lo - 1.0) ? int8_t{1} : int8_t{-1};
  }

  // Flow pair per effectively closed line (both endpoints energized; islanded
  // components never host flow). Free variables, started at zero.
  std::vector<int> fp_var(net.lines.size(), -1);
  std::vector<int> fq_var(net.lines.size(), -1);
  std::vector<char> closed(net.lines.size(), 0);
  for (int id : c.topology.closed_lines)
    closed[static_cast<size_t>(net.line_index(id))] = 1;
  for (size_t li = 0; li < net.lines.size(); ++li) {
    if (!closed[li]) continue;
    const Line& l = net.lines[li];
    if (!c.topology.is_energized(l.from_bus)) continue;
    fp_var[li] = lp.add_var(-kInf, kInf, 0.0, "Fp_" + l.name());
    fq_var[li] = lp.add_var(-kInf, kInf, 0.0, "Fq_" + l.name());
  }

  // Shed variable per energized load bus, priced at eta*dt and started at full
  // shedding (the always-feasible point).
  std::vector<int> shed_var(net.buses.size(), -1);
  for (size_t k = 0; k < net.buses.size(); ++k) {
    const Bus& b = net.buses[k];
    if (b.is_substation || !c.topology.is_energized(b.id)) continue;
    if (c.loads[k].first <= 0) continue;
    shed_var[k] = lp.add_var(0.0, c.loads[k].first, shed_price,
                             "shed_" + std::to_string(b.id));
    lp.start_hint.back() = 1;
  }

  // Power balance at every energized load bus: in - out + shed = demand, with
  // reactive shedding tied proportionally to real shedding.
  for (size_t k = 0; k < net.buses.size(); ++k) {
    const Bus& b = net.buses[k];
    if (b.is_substation || !c.topology.is_energized(b.id)) continue;
    const auto& [p, q] = c.loads[k];
    std::vector<std::pair<int, double>> pt, qt;
    for (int li : net.lines_at(static_cast<int>(k))) {
      if (fp_var[static_cast<size_t>(li)] < 0) continue;
      const Line& l = net.lines[static_cast<size_t>(li)];
      double sign = l.to_bus == b.id ? 1.0 : -1.0;
      pt.emplace_back(fp_var[static_cast<size_t>(li)], sign);
      qt.emplace_back(fq_var[static_cast<size_t>(li)], sign);
    }
    if (shed_var[k] >= 0) {
      pt.emplace_back(shed_var[k], 1.0);
      qt.emplace_back(shed_var[k], q / p);
    }
    lp.add_row(p, p, std::move(pt));
    lp.add_row(q, q, std::move(qt));
  }

  // Voltage drop along closed lines; relaxed by +-M when a line is open but
  // both endpoints are energized through other paths.
  for (size_t li = 0; li < net.lines.size(); ++li) {
    const Line& l = net.lines[li];
    int uf = u_var[static_cast<size_t>(net.bus_index(l.from_bus))];
    int ut = u_var[static_cast<size_t>(net.bus_index(l.to_bus))];
    if (uf < 0 || ut < 0) continue;
    if (fp_var[li] >= 0) {
      lp.add_row(0.0, 0.0,
                 {{uf, 1.0}, {ut, -1.0}, {fp_var[li], -2.0 * l.r / net.base_mva},
                  {fq_var[li], -2.0 * l.x / net.base_mva}});
    } else {
      lp.add_row(-big_m, big_m, {{uf, 1.0}, {ut, -1.0}});
    }
  }

  // Octagonal capacity: axis cuts plus 45-degree cuts, tangent to the disk of
  // radius smax. Admits corner points beyond the disk (flagged downstream).
  for (size_t li = 0; li < net.lines.size(); ++li) {
    if (fp_var[li] < 0) continue;
    double cap = net.lines[li].s_max;
    double diag = kSqrt2 * cap;
    lp.add_row(-cap, cap, {{fp_var[li], 1.0}});
    lp.add_row(-cap, cap, {{fq_var[li], 1.0}});
    lp.add_row(-diag, diag, {{fp_var[li], 1.0}, {fq_var[li], 1.0}});
    lp.add_row(-diag, diag, {{fp_var[li], 1.0}, {fq_var[li], -1.0}});
  }

  return lp;
}

nlohmann::json DispatchResult::to_json(const Network& net) const {
  nlohmann::json j;
  j["feasible"] = feasible;
  j["cost"] = cost;
  j["breakdown"] = {{"shed_lp", breakdown.shed_cost_lp},
                    {"shed_islanded", breakdown.shed_cost_islanded},
                    {"switch", breakdown.switch_cost}};
  j["buses"] = nlohmann::json::array();
  for (size_t k = 0; k < net.buses.size(); ++k) {
    j["buses"].push_back({{"id", net.buses[k].id},
                          {"shed_mw", shed_p[k]},
                          {"shed_mvar", shed_q[k]},
                          {"voltage_sq", voltages_sq[k]}});
  }
  j["lines"] = nlohmann::json::array();
  for (size_t li = 0; li < net.lines.size(); ++li) {
    j["lines"].push_back({{"id", net.lines[li].id},
                          {"name", net.lines[li].name()},
                          {"flow_mw", flows[li].first},
                          {"flow_mvar", flows[li].second}});
  }
  j["quadratic_capacity_flags"] = quadratic_capacity_flags;
  return j;
}

std::pair<double, DispatchResult> immediate_cost(const Network& net,
                                                 const MarkovState& state,
                                                 const SwitchConfig& action,
                                                 const DispatchCase& c) {
  DispatchCase cc = c;
  const std::vector<int> closed = effective_closed_ids(net, state, action);
  cc.topology = energization(net, closed, state.failed_ids());
  validate_dispatch_case(net, cc);

  DispatchResult r;
  r.feasible = true;
  r.shed_p.assign(net.buses.size(), 0.0);
  r.shed_q.assign(net.buses.size(), 0.0);
  r.voltages_sq.assign(net.buses.size(), 0.0);
  r.flows.assign(net.lines.size(), {0.0, 0.0});

  double shed_total_mw = 0.0;
  if (!try_zero_shed(net, cc, &r, &shed_total_mw)) {
    LinearProgram lp = build_dispatch_lp(net, cc);
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
      throw NumericalError("dispatch LP failed: " + to_string(sol.status) +
                           " (period " + std::to_string(cc.period) +
                           ", state " + state.encode() + ")");

    // Recover the variable layout by name (one pass; the names are unique).
    std::unordered_map<std::string, int> by_name;
    by_name.reserve(static_cast<size_t>(lp.num_vars));
    for (int j = 0; j < lp.num_vars; ++j)
      by_name.emplace(lp.var_names[static_cast<size_t>(j)], j);
    auto var_of = [&by_name](const std::string& name) {
      auto it = by_name.find(name);
      return it == by_name.end() ? -1 : it->second;
    };

    for (size_t k = 0; k < net.buses.size(); ++k) {
      const Bus& b = net.buses[k];
      if (!cc.topology.is_energized(b.id)) continue;
      int uj = var_of("U_" + std::to_string(b.id));
      if (uj >= 0) r.voltages_sq[k] = sol.x[static_cast<size_t>(uj)];
      int sj = var_of("shed_" + std::to_string(b.id));
      if (sj >= 0) {
        double v = std::clamp(sol.x[static_cast<size_t>(sj)], 0.0,
                              cc.loads[k].first);
        if (std::abs(v) < kSnapTol) v = 0.0;
        r.shed_p[k] = v;
        r.shed_q[k] = cc.loads[k].first > 0
                          ? v * cc.loads[k].second / cc.loads[k].first
                          : 0.0;
        shed_total_mw += v;
      }
    }

    for (size_t li = 0; li < net.lines.size(); ++li) {
      const Line& l = net.lines[li];
      int pj = var_of("Fp_" + l.name());
      if (pj < 0) continue;
      int qj = var_of("Fq_" + l.name());
      double fp = sol.x[static_cast<size_t>(pj)];
      double fq = sol.x[static_cast<size_t>(qj)];
      if (std::abs(fp) < kSnapTol) fp = 0.0;
      if (std::abs(fq) < kSnapTol) fq = 0.0;
      r.flows[li] = {fp, fq};
      if (fp * fp + fq * fq > l.s_max * l.s_max * (1.0 + 1e-9))
        r.quadratic_capacity_flags.push_back(l.id);
    }
  }

  double islanded_mw = 0.0;
  for (int id : cc.topology.islanded_buses) {
    size_t k = static_cast<size_t>(net.bus_index(id));
    r.shed_p[k] = cc.loads[k].first;
    r.shed_q[k] = cc.loads[k].second;
    islanded_mw += cc.loads[k].first;
  }

  double switch_cost = 0.0;
  for (int id : closed) {
    const Line& l = net.lines[static_cast<size_t>(net.line_index(id))];
    if (l.dispatchable) switch_cost += l.switch_cost;
  }

  r.breakdown.shed_cost_lp = cc.eta * cc.dt * shed_total_mw;
  r.breakdown.shed_cost_islanded = cc.eta * cc.dt * islanded_mw;
  r.breakdown.switch_cost = switch_cost;
  r.cost = r.breakdown.total();
  return {r.cost, r};
}

}  // namespace gridres
