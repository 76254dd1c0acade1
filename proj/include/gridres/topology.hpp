#pragma once

#include <vector>

#include "gridres/network.hpp"

namespace gridres {

// Result of an energization pass: which buses can reach a substation through
// effectively closed lines.
struct Topology {
  std::vector<int> closed_lines;     // effective closed set (closed \ failed)
  std::vector<int> energized_buses;  // bus ids, sorted
  std::vector<int> islanded_buses;   // bus ids, sorted

  bool is_energized(int bus_id) const;
};

// closed/failed are line id sets (unsorted input tolerated). A line listed in
// both is treated as failed (effective closed = closed \ failed).
Topology energization(const Network& net, const std::vector<int>& closed,
                      const std::vector<int>& failed);

// True iff every component of the effective-closed subgraph that contains a
// substation is a tree with exactly one substation. Components without a
// substation are islanded and unconstrained (they may even hold cycles).
bool is_radial(const Network& net, const std::vector<int>& closed,
               const std::vector<int>& failed);

}  // namespace gridres
