#include "gridres/actions.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace gridres {
namespace {

// Union-find with an undo stack (union by size, no path compression) so the
// 2^m enumeration can backtrack in O(1) per undone operation. Tracks per-root
// substation counts and cycle flags; closings that would join two
// substations, or put a cycle behind one, are rejected eagerly. A cycle in a
// substation-free component is allowed — it may legitimately stay islanded —
// and the component only becomes invalid if a later closing energizes it.
struct RollbackDsu {
  std::vector<int> parent, size, subs;
  std::vector<char> cycle;
  struct Undo {
    int child;  // -1 encodes "cycle flag was set on root"
    int root;
    char old_cycle;
  };
  std::vector<Undo> log;

  RollbackDsu(int n, const std::vector<char>& is_sub)
      : parent(n), size(n, 1), subs(n, 0), cycle(n, 0) {
    for (int i = 0; i < n; ++i) {
      parent[i] = i;
      subs[i] = is_sub[i] ? 1 : 0;
    }
  }
  int find(int v) const {
    while (parent[v] != v) v = parent[v];
    return v;
  }
  // Attempts to close edge (a, b); returns false (state unchanged) when no
  // completion of the current partial assignment can be radial.
  bool close_edge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) {
      if (subs[a] > 0) return false;  // cycle behind a substation
      log.push_back({-1, a, cycle[a]});
      cycle[a] = 1;
      return true;
    }
    if (subs[a] + subs[b] >= 2) return false;  // would join two substations
    if ((cycle[a] || cycle[b]) && subs[a] + subs[b] == 1)
      return false;  // cycle would become energized
    if (size[a] < size[b]) std::swap(a, b);
    log.push_back({b, a, cycle[a]});
    parent[b] = a;
    size[a] += size[b];
    subs[a] += subs[b];
    cycle[a] = cycle[a] || cycle[b];
    return true;
  }
  size_t mark() const { return log.size(); }
  void rollback(size_t mark) {
    while (log.size() > mark) {
      Undo u = log.back();
      log.pop_back();
      if (u.child == -1) {
        cycle[u.root] = u.old_cycle;
        continue;
      }
      parent[u.child] = u.child;
      size[u.root] -= size[u.child];
      subs[u.root] -= subs[u.child];
      cycle[u.root] = u.old_cycle;
    }
  }
};

struct Enumerator {
  const Network& net;
  RollbackDsu dsu;
  std::vector<std::pair<int, int>> disp_ends;  // bus indices per decision line
  std::vector<int> disp_ids;
  std::vector<int> open_now;
  std::vector<SwitchConfig> out;

  Enumerator(const Network& n, const std::vector<char>& is_sub)
      : net(n), dsu(n.num_buses(), is_sub) {}

  void recurse(size_t depth) {
    if (depth == disp_ids.size()) {
      out.push_back(SwitchConfig{open_now});
      return;
    }
    // Branch 1: close this line (prune if provably non-radial).
    size_t m = dsu.mark();
    if (dsu.close_edge(disp_ends[depth].first, disp_ends[depth].second)) {
      recurse(depth + 1);
      dsu.rollback(m);
    }
    // Branch 2: hold it open.
    open_now.push_back(disp_ids[depth]);
    recurse(depth + 1);
    open_now.pop_back();
  }
};

std::vector<SwitchConfig> enumerate_uncached(const Network& net,
                                             const MarkovState& state) {
  std::vector<char> is_sub(net.num_buses(), 0);
  for (int si : net.substation_bus_indices()) is_sub[si] = 1;
  Enumerator en(net, is_sub);

  // Base layer: surviving non-dispatchable lines at their initial position.
  for (const Line& l : net.lines) {
    if (l.dispatchable || !l.initially_closed) continue;
    if (state.is_failed(l.id)) continue;
    if (!en.dsu.close_edge(net.bus_index(l.from_bus), net.bus_index(l.to_bus)))
      return {};  // the fixed layer alone rules out radiality
  }
  // Decision layer: dispatchable surviving lines, ascending id.
  for (int id : net.dispatchable_line_ids()) {
    if (state.is_failed(id)) continue;
    const Line& l = net.line(id);
    en.disp_ids.push_back(id);
    en.disp_ends.emplace_back(net.bus_index(l.from_bus),
                              net.bus_index(l.to_bus));
  }
  input_check(en.disp_ids.size() <= 20,
              "enumerate_actions: " + std::to_string(en.disp_ids.size()) +
                  " dispatchable surviving lines exceed the 2^20 cap");

  en.recurse(0);
  std::sort(en.out.begin(), en.out.end());
  return en.out;
}

struct CacheKey {
  uint64_t net_hash;
  LineMask failed;
  friend bool operator==(const CacheKey&, const CacheKey&) = default;
  struct Hash {
    size_t operator()(const CacheKey& k) const {
      return LineMask::Hash{}(k.failed) ^ k.net_hash;
    }
  };
};

std::mutex g_cache_mu;
std::unordered_map<CacheKey, std::unique_ptr<std::vector<SwitchConfig>>,
                   CacheKey::Hash>
    g_cache;

}  // namespace

const std::vector<SwitchConfig>& enumerate_actions(const Network& net,
                                                   const MarkovState& state) {
  CacheKey key{net.content_hash(), net.mask_of_ids(state.failed_ids())};
  {
    std::lock_guard<std::mutex> lock(g_cache_mu);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) return *it->second;
  }
  auto computed = std::make_unique<std::vector<SwitchConfig>>(
      enumerate_uncached(net, state));
  std::lock_guard<std::mutex> lock(g_cache_mu);
  auto [it, _] = g_cache.try_emplace(key, std::move(computed));
  return *it->second;
}

void clear_action_cache() {
  std::lock_guard<std::mutex> lock(g_cache_mu);
  g_cache.clear();
}

}  // namespace gridres
