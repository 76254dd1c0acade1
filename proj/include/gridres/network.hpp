#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gridres/common.hpp"

namespace gridres {

struct Bus {
  int id = 0;
  double p_load = 0.0;  // active demand per period, MW
  double q_load = 0.0;  // reactive demand per period, MVAr
  bool is_substation = false;
  double v_min = 0.9;  // voltage magnitude bounds, p.u.
  double v_max = 1.05;
};

struct Line {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;  // p.u.
  double x = 0.0;  // p.u.
  double s_max = 0.0;  // MVA
  bool dispatchable = false;
  bool initially_closed = true;
  double switch_cost = 0.0;  // $/period while closed (dispatchable lines)

  // Endpoint naming used in reports, e.g. "6-7".
  std::string name() const {
    return std::to_string(from_bus) + "-" + std::to_string(to_bus);
  }
};

// Immutable after load/validation; index tables are precomputed so the hot
// paths work with dense indices instead of ids.
class Network {
 public:
  double base_mva = 1.0;
  double base_kv = 1.0;
  std::vector<Bus> buses;
  std::vector<Line> lines;

  static Network from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Validates all invariants and builds the index tables; throws InputError
  // naming the offending bus/line otherwise. from_json calls this.
  void finalize();

  int num_buses() const { return static_cast<int>(buses.size()); }
  int num_lines() const { return static_cast<int>(lines.size()); }

  int bus_index(int bus_id) const;    // throws InputError on unknown id
  int line_index(int line_id) const;  // throws InputError on unknown id
  const Bus& bus(int bus_id) const { return buses[bus_index(bus_id)]; }
  const Line& line(int line_id) const { return lines[line_index(line_id)]; }

  // Line indices incident to a bus index.
  const std::vector<int>& lines_at(int bus_idx) const { return adj_[bus_idx]; }
  const std::vector<int>& substation_bus_indices() const { return subs_; }

  // Line ids of dispatchable lines, ascending.
  const std::vector<int>& dispatchable_line_ids() const { return disp_ids_; }
  // Dispatchable lines that start open: the initial open_dispatchable set.
  const std::vector<int>& initial_open_dispatchable() const {
    return initial_open_disp_;
  }

  // Sorted ids -> mask over line indices (each id must exist).
  LineMask mask_of_ids(const std::vector<int>& line_ids) const;

  // Hash of the canonical JSON serialization, computed by finalize();
  // stamped into output headers and used as the action-cache key.
  uint64_t content_hash() const { return hash_; }

  double total_p_load() const { return total_p_; }

 private:
  std::vector<std::vector<int>> adj_;
  std::vector<int> subs_;
  std::vector<int> disp_ids_;
  std::vector<int> initial_open_disp_;
  std::vector<std::pair<int, int>> bus_id_index_;   // sorted by id
  std::vector<std::pair<int, int>> line_id_index_;  // sorted by id
  double total_p_ = 0.0;
  uint64_t hash_ = 0;
};

Network load_network(const std::string& path);
void save_network(const Network& net, const std::string& path);

}  // namespace gridres
