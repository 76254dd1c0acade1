#include "gridres/topology.hpp"

#include <algorithm>

namespace gridres {
namespace {

// Union-find over bus indices with per-root bookkeeping of substation count,
// edge count, and vertex count.
struct Dsu {
  std::vector<int> parent, size;
  explicit Dsu(int n) : parent(n), size(n, 1) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }
  // Returns false if already joined (a cycle edge).
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
    return true;
  }
};

std::vector<char> effective_closed_flags(const Network& net,
                                         const std::vector<int>& closed,
                                         const std::vector<int>& failed) {
  std::vector<char> flag(net.num_lines(), 0);
  for (int id : closed) flag[net.line_index(id)] = 1;
  for (int id : failed) flag[net.line_index(id)] = 0;
  return flag;
}

}  // namespace

bool Topology::is_energized(int bus_id) const {
  return std::binary_search(energized_buses.begin(), energized_buses.end(),
                            bus_id);
}

Topology energization(const Network& net, const std::vector<int>& closed,
                      const std::vector<int>& failed) {
  auto flag = effective_closed_flags(net, closed, failed);
  Dsu dsu(net.num_buses());
  for (int li = 0; li < net.num_lines(); ++li) {
    if (!flag[li]) continue;
    const Line& l = net.lines[li];
    dsu.unite(net.bus_index(l.from_bus), net.bus_index(l.to_bus));
  }
  std::vector<char> root_has_sub(net.num_buses(), 0);
  for (int si : net.substation_bus_indices()) root_has_sub[dsu.find(si)] = 1;

  Topology topo;
  for (int li = 0; li < net.num_lines(); ++li)
    if (flag[li]) topo.closed_lines.push_back(net.lines[li].id);
  std::sort(topo.closed_lines.begin(), topo.closed_lines.end());
  for (int bi = 0; bi < net.num_buses(); ++bi) {
    if (root_has_sub[dsu.find(bi)])
      topo.energized_buses.push_back(net.buses[bi].id);
    else
      topo.islanded_buses.push_back(net.buses[bi].id);
  }
  std::sort(topo.energized_buses.begin(), topo.energized_buses.end());
  std::sort(topo.islanded_buses.begin(), topo.islanded_buses.end());
  return topo;
}

bool is_radial(const Network& net, const std::vector<int>& closed,
               const std::vector<int>& failed) {
  auto flag = effective_closed_flags(net, closed, failed);
  Dsu dsu(net.num_buses());
  std::vector<char> cycle(net.num_buses(), 0);  // indexed by root
  for (int li = 0; li < net.num_lines(); ++li) {
    if (!flag[li]) continue;
    const Line& l = net.lines[li];
    int a = dsu.find(net.bus_index(l.from_bus));
    int b = dsu.find(net.bus_index(l.to_bus));
    if (a == b) {
      cycle[a] = 1;
    } else {
      bool c = cycle[a] || cycle[b];
      dsu.unite(a, b);
      cycle[dsu.find(a)] = c;
    }
  }
  std::vector<int> sub_count(net.num_buses(), 0);
  for (int si : net.substation_bus_indices()) ++sub_count[dsu.find(si)];
  for (int bi = 0; bi < net.num_buses(); ++bi) {
    if (dsu.find(bi) != bi) continue;
    if (sub_count[bi] >= 2) return false;            // two roots, one component
    if (sub_count[bi] == 1 && cycle[bi]) return false;  // loop behind a root
  }
  return true;
}

}  // namespace gridres
