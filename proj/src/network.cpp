#include "gridres/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace gridres {
namespace {

using nlohmann::json;

double require_number(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw InputError(ctx + ": missing field '" + key + "'");
  if (!it->is_number())
    throw InputError(ctx + ": field '" + key + "' must be a number");
  double v = it->get<double>();
  if (!std::isfinite(v))
    throw InputError(ctx + ": field '" + key + "' is not finite");
  return v;
}

int require_int(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw InputError(ctx + ": missing field '" + key + "'");
  if (!it->is_number_integer())
    throw InputError(ctx + ": field '" + key + "' must be an integer");
  return it->get<int>();
}

bool optional_bool(const json& j, const char* key, bool fallback,
                   const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean())
    throw InputError(ctx + ": field '" + key + "' must be a boolean");
  return it->get<bool>();
}

}  // namespace

Network Network::from_json(const json& j) {
  if (!j.is_object()) throw InputError("network: top level must be an object");
  Network net;
  net.base_mva = require_number(j, "base_mva", "network");
  net.base_kv = require_number(j, "base_kv", "network");
  input_check(net.base_mva > 0, "network: base_mva must be positive");
  input_check(net.base_kv > 0, "network: base_kv must be positive");

  auto buses = j.find("buses");
  if (buses == j.end() || !buses->is_array())
    throw InputError("network: missing 'buses' array");
  for (const auto& bj : *buses) {
    Bus b;
    b.id = require_int(bj, "id", "bus");
    const std::string ctx = "bus " + std::to_string(b.id);
    b.p_load = require_number(bj, "p_mw", ctx);
    b.q_load = require_number(bj, "q_mvar", ctx);
    b.is_substation = optional_bool(bj, "substation", false, ctx);
    b.v_min = require_number(bj, "vmin", ctx);
    b.v_max = require_number(bj, "vmax", ctx);
    net.buses.push_back(b);
  }

  auto lines = j.find("lines");
  if (lines == j.end() || !lines->is_array())
    throw InputError("network: missing 'lines' array");
  for (const auto& lj : *lines) {
    Line l;
    l.id = require_int(lj, "id", "line");
    const std::string ctx = "line " + std::to_string(l.id);
    l.from_bus = require_int(lj, "from", ctx);
    l.to_bus = require_int(lj, "to", ctx);
    l.r = require_number(lj, "r_pu", ctx);
    l.x = require_number(lj, "x_pu", ctx);
    l.s_max = require_number(lj, "smax_mva", ctx);
    l.dispatchable = optional_bool(lj, "dispatchable", false, ctx);
    l.initially_closed = optional_bool(lj, "closed", true, ctx);
    l.switch_cost = lj.contains("switch_cost")
                        ? require_number(lj, "switch_cost", ctx)
                        : 0.0;
    net.lines.push_back(l);
  }

  net.finalize();
  return net;
}

json Network::to_json() const {
  json j;
  j["base_mva"] = base_mva;
  j["base_kv"] = base_kv;
  j["buses"] = json::array();
  for (const auto& b : buses) {
    j["buses"].push_back({{"id", b.id},
                          {"p_mw", b.p_load},
                          {"q_mvar", b.q_load},
                          {"substation", b.is_substation},
                          {"vmin", b.v_min},
                          {"vmax", b.v_max}});
  }
  j["lines"] = json::array();
  for (const auto& l : lines) {
    j["lines"].push_back({{"id", l.id},
                          {"from", l.from_bus},
                          {"to", l.to_bus},
                          {"r_pu", l.r},
                          {"x_pu", l.x},
                          {"smax_mva", l.s_max},
                          {"dispatchable", l.dispatchable},
                          {"closed", l.initially_closed},
                          {"switch_cost", l.switch_cost}});
  }
  return j;
}

void Network::finalize() {
  input_check(!buses.empty(), "network: no buses");
  input_check(!lines.empty(), "network: no lines");
  input_check(num_lines() <= LineMask::kCapacity,
              "network: more than " + std::to_string(LineMask::kCapacity) +
                  " lines is not supported");

  bus_id_index_.clear();
  line_id_index_.clear();
  for (int i = 0; i < num_buses(); ++i)
    bus_id_index_.emplace_back(buses[i].id, i);
  std::sort(bus_id_index_.begin(), bus_id_index_.end());
  for (size_t i = 1; i < bus_id_index_.size(); ++i)
    input_check(bus_id_index_[i].first != bus_id_index_[i - 1].first,
                "duplicate bus id " + std::to_string(bus_id_index_[i].first));
  for (int i = 0; i < num_lines(); ++i)
    line_id_index_.emplace_back(lines[i].id, i);
  std::sort(line_id_index_.begin(), line_id_index_.end());
  for (size_t i = 1; i < line_id_index_.size(); ++i)
    input_check(line_id_index_[i].first != line_id_index_[i - 1].first,
                "duplicate line id " + std::to_string(line_id_index_[i].first));

  subs_.clear();
  total_p_ = 0.0;
  for (int i = 0; i < num_buses(); ++i) {
    const Bus& b = buses[i];
    const std::string ctx = "bus " + std::to_string(b.id);
    input_check(b.p_load >= 0, ctx + ": p_mw must be >= 0");
    input_check(std::abs(b.q_load) <= b.p_load * 10.0 + 1e-12,
                ctx + ": |q_mvar| exceeds 10x p_mw sanity bound");
    input_check(b.v_min > 0 && b.v_min < b.v_max && b.v_max <= 1.2,
                ctx + ": voltage bounds must satisfy 0 < vmin < vmax <= 1.2");
    if (b.is_substation) {
      input_check(b.p_load == 0 && b.q_load == 0,
                  ctx + ": substation buses carry no load");
      subs_.push_back(i);
    }
    total_p_ += b.p_load;
  }
  input_check(!subs_.empty(), "network: at least one substation required");

  adj_.assign(num_buses(), {});
  disp_ids_.clear();
  initial_open_disp_.clear();
  for (int i = 0; i < num_lines(); ++i) {
    const Line& l = lines[i];
    const std::string ctx = "line " + std::to_string(l.id);
    input_check(l.from_bus != l.to_bus, ctx + ": from == to");
    input_check(l.r >= 0 && l.x >= 0 && l.r + l.x > 0,
                ctx + ": need r,x >= 0 and r+x > 0");
    input_check(l.s_max > 0, ctx + ": smax_mva must be positive");
    input_check(l.switch_cost >= 0, ctx + ": switch_cost must be >= 0");
    int fi = bus_index(l.from_bus);  // throws naming the unknown id
    int ti = bus_index(l.to_bus);
    adj_[fi].push_back(i);
    adj_[ti].push_back(i);
    if (l.dispatchable) {
      disp_ids_.push_back(l.id);
      if (!l.initially_closed) initial_open_disp_.push_back(l.id);
    }
  }
  std::sort(disp_ids_.begin(), disp_ids_.end());
  std::sort(initial_open_disp_.begin(), initial_open_disp_.end());

  // Everything closed must form one connected graph (failures may split it
  // later, but the as-built network is whole).
  std::vector<int> seen(num_buses(), 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int li : adj_[u]) {
      const Line& l = lines[li];
      int v = bus_index(l.from_bus) == u ? bus_index(l.to_bus)
                                         : bus_index(l.from_bus);
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  input_check(count == num_buses(),
              "network: graph with all lines present is not connected");

  hash_ = fnv1a(to_json().dump());
}

int Network::bus_index(int bus_id) const {
  auto it = std::lower_bound(bus_id_index_.begin(), bus_id_index_.end(),
                             std::make_pair(bus_id, -1));
  if (it == bus_id_index_.end() || it->first != bus_id)
    throw InputError("unknown bus id " + std::to_string(bus_id));
  return it->second;
}

int Network::line_index(int line_id) const {
  auto it = std::lower_bound(line_id_index_.begin(), line_id_index_.end(),
                             std::make_pair(line_id, -1));
  if (it == line_id_index_.end() || it->first != line_id)
    throw InputError("unknown line id " + std::to_string(line_id));
  return it->second;
}

LineMask Network::mask_of_ids(const std::vector<int>& line_ids) const {
  LineMask m;
  for (int id : line_ids) m.set(line_index(id));
  return m;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open network file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("network file " + path + ": " + e.what());
  }
  try {
    return Network::from_json(j);
  } catch (const InputError& e) {
    throw InputError("network file " + path + ": " + e.what());
  }
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write network file: " + path);
  out << net.to_json().dump(2) << "\n";
}

}  // namespace gridres
