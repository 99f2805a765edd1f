#ifndef NETLOC_GRAPH_HPP_
#define NETLOC_GRAPH_HPP_

// Sensing topology, layered-graph validation and the augmented communication graph.
//
// An edge (i, j) means agent i measures agent j, i.e. j is a neighbour of i.
// Each follower designates exactly two neighbours whose measurements form its
// complex constraint; only those designated edges enter the constraint matrix,
// so layer validation runs on the designated subgraph.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netloc/errors.hpp"
#include "netloc/geometry.hpp"

namespace netloc {

using Edge = std::pair<AgentId, AgentId>;
using NeighborPair = std::pair<AgentId, AgentId>;

class SensingGraph {
 public:
  SensingGraph(std::size_t agent_count, std::size_t leader_count, std::set<Edge> edges,
               std::map<AgentId, NeighborPair> designated)
      : n_(agent_count), m_(leader_count), edges_(std::move(edges)),
        designated_(std::move(designated)) {
    if (m_ < 2) throw ValidationError("at least two leaders are required");
    if (n_ <= m_) throw ValidationError("the network has no followers");
    for (auto [i, j] : edges_) {
      if (i >= n_ || j >= n_) throw ValidationError("edge references an undefined agent");
      if (i == j) throw ValidationError("self loop on agent " + std::to_string(i + 1));
    }
    for (auto& [i, pair] : designated_) {
      if (i >= n_) throw ValidationError("designated pair for an undefined agent");
      if (i < m_)
        throw ValidationError("leader " + std::to_string(i + 1) + " cannot designate neighbours");
    }
    for (AgentId i = m_; i < n_; ++i) {
      auto it = designated_.find(i);
      if (it == designated_.end())
        throw ValidationError("follower " + std::to_string(i + 1) + " has no designated pair");
      auto [j, k] = it->second;
      if (j >= n_ || k >= n_) throw ValidationError("designated neighbour is undefined");
      if (j == k || j == i || k == i)
        throw ValidationError("follower " + std::to_string(i + 1) +
                              " needs two distinct neighbours other than itself");
      if (!edges_.contains({i, j}) || !edges_.contains({i, k}))
        throw ValidationError("designated pair of follower " + std::to_string(i + 1) +
                              " is not in its neighbour set");
    }
  }

  /// Graph whose edge set is exactly the designated edges.
  static SensingGraph from_designated(std::size_t agent_count, std::size_t leader_count,
                                      std::map<AgentId, NeighborPair> designated) {
    std::set<Edge> edges;
    for (auto& [i, pair] : designated) {
      edges.insert({i, pair.first});
      edges.insert({i, pair.second});
    }
    return SensingGraph(agent_count, leader_count, std::move(edges), std::move(designated));
  }

  std::size_t agent_count() const noexcept { return n_; }
  std::size_t leader_count() const noexcept { return m_; }
  std::size_t follower_count() const noexcept { return n_ - m_; }
  bool is_leader(AgentId i) const noexcept { return i < m_; }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  const std::map<AgentId, NeighborPair>& designated() const noexcept { return designated_; }
  NeighborPair designated_pair(AgentId follower) const { return designated_.at(follower); }

  std::vector<AgentId> neighbors(AgentId i) const {
    std::vector<AgentId> out;
    for (auto it = edges_.lower_bound({i, 0}); it != edges_.end() && it->first == i; ++it)
      out.push_back(it->second);
    return out;
  }

 private:
  std::size_t n_;
  std::size_t m_;
  std::set<Edge> edges_;
  std::map<AgentId, NeighborPair> designated_;
};

/// Layer label per agent, 1-based as in the layered-graph definition.
class LayerAssignment {
 public:
  explicit LayerAssignment(std::vector<int> layer_of) : layer_of_(std::move(layer_of)) {
    for (int h : layer_of_)
      if (h < 1) throw ValidationError("layer labels start at 1");
    kappa_ = layer_of_.empty() ? 0 : *std::max_element(layer_of_.begin(), layer_of_.end());
  }

  /// Build from explicit layer member lists; layers[0] is layer 1.
  static LayerAssignment from_layers(std::size_t agent_count,
                                     const std::vector<std::vector<AgentId>>& layers) {
    std::vector<int> layer_of(agent_count, 0);
    for (std::size_t h = 0; h < layers.size(); ++h)
      for (AgentId a : layers[h]) {
        if (a >= agent_count) throw ValidationError("layer references an undefined agent");
        if (layer_of[a] != 0)
          throw ValidationError("agent " + std::to_string(a + 1) + " appears in two layers");
        layer_of[a] = static_cast<int>(h) + 1;
      }
    for (std::size_t a = 0; a < agent_count; ++a)
      if (layer_of[a] == 0)
        throw ValidationError("agent " + std::to_string(a + 1) + " is not assigned to a layer");
    return LayerAssignment(std::move(layer_of));
  }

  int operator[](AgentId i) const { return layer_of_.at(i); }
  int kappa() const noexcept { return kappa_; }
  std::size_t size() const noexcept { return layer_of_.size(); }

 private:
  std::vector<int> layer_of_;
  int kappa_ = 0;
};

struct FollowerCheck {
  AgentId agent = 0;
  int layer = 0;
  bool in_cycle = false;
  bool ok = false;
  /// Lower-layer agents (k, g) the follower's cycle is anchored to.
  std::optional<NeighborPair> anchors;
  std::string detail;
};

struct ValidationReport {
  bool accepted = false;
  std::vector<FollowerCheck> followers;

  std::string describe() const {
    std::ostringstream os;
    os << (accepted ? "accepted" : "rejected") << " as a layered graph\n";
    for (const auto& f : followers) {
      os << "  follower " << f.agent + 1 << " (layer " << f.layer << ", "
         << (f.in_cycle ? "on a cycle" : "acyclic") << "): " << (f.ok ? "ok" : "FAIL");
      if (f.anchors) os << " anchors " << f.anchors->first + 1 << "," << f.anchors->second + 1;
      if (!f.detail.empty()) os << " - " << f.detail;
      os << '\n';
    }
    return os.str();
  }
};

/// A layered-graph violation; carries the full per-follower report.
class KappaLayerViolation : public ValidationError {
 public:
  explicit KappaLayerViolation(ValidationReport report)
      : ValidationError("sensing graph is not a valid layered graph:\n" + report.describe()),
        report_(std::move(report)) {}
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

namespace detail {

/// Strongly connected component id per vertex (Tarjan).
inline std::vector<int> strongly_connected_components(
    const std::vector<std::vector<AgentId>>& adj) {
  const std::size_t n = adj.size();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<AgentId> stack;
  int counter = 0, comp_count = 0;

  std::function<void(AgentId)> visit = [&](AgentId v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (AgentId w : adj[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      AgentId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = comp_count;
      } while (w != v);
      ++comp_count;
    }
  };
  for (AgentId v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  return comp;
}

/// Number of internally vertex-disjoint directed paths from `from` that end at
/// distinct members of `targets` (unit vertex capacities via vertex splitting).
inline int disjoint_paths_to(const std::vector<std::vector<AgentId>>& adj, AgentId from,
                             const std::vector<AgentId>& targets) {
  const std::size_t n = adj.size();
  // Node 2v = v_in, 2v+1 = v_out, 2n = sink.
  const std::size_t node_count = 2 * n + 1;
  const std::size_t sink = 2 * n;
  struct Arc {
    std::size_t to;
    int cap;
    std::size_t rev;
  };
  std::vector<std::vector<Arc>> g(node_count);
  auto add = [&](std::size_t u, std::size_t v, int cap) {
    g[u].push_back({v, cap, g[v].size()});
    g[v].push_back({u, 0, g[u].size() - 1});
  };
  for (AgentId v = 0; v < n; ++v) {
    add(2 * v, 2 * v + 1, v == from ? 2 : 1);
    for (AgentId w : adj[v]) add(2 * v + 1, 2 * w, 1);
  }
  for (AgentId t : targets) add(2 * t + 1, sink, 1);

  const std::size_t source = 2 * from + 1;
  int flow = 0;
  while (true) {
    std::vector<std::pair<std::size_t, std::size_t>> parent(
        node_count, {std::numeric_limits<std::size_t>::max(), 0});
    std::queue<std::size_t> q;
    q.push(source);
    parent[source] = {source, 0};
    while (!q.empty() && parent[sink].first == std::numeric_limits<std::size_t>::max()) {
      std::size_t u = q.front();
      q.pop();
      for (std::size_t e = 0; e < g[u].size(); ++e) {
        const Arc& a = g[u][e];
        if (a.cap > 0 && parent[a.to].first == std::numeric_limits<std::size_t>::max()) {
          parent[a.to] = {u, e};
          q.push(a.to);
        }
      }
    }
    if (parent[sink].first == std::numeric_limits<std::size_t>::max()) break;
    for (std::size_t v = sink; v != source;) {
      auto [u, e] = parent[v];
      g[u][e].cap -= 1;
      g[v][g[u][e].rev].cap += 1;
      v = u;
    }
    ++flow;
  }
  return flow;
}

}  // namespace detail

/// Check the layered-graph conditions on the designated subgraph.
///
/// Throws ValidationError when the layer assignment itself is malformed (layer 1
/// must be exactly the leader set, every follower above it, at least two layers).
inline ValidationReport validate_kappa_layer(const SensingGraph& g, const LayerAssignment& layers) {
  const std::size_t n = g.agent_count();
  if (layers.size() != n) throw ValidationError("layer assignment does not cover every agent");
  for (AgentId a = 0; a < n; ++a) {
    if (g.is_leader(a) && layers[a] != 1)
      throw ValidationError("leader " + std::to_string(a + 1) + " must be in layer 1");
    if (!g.is_leader(a) && layers[a] == 1)
      throw ValidationError("follower " + std::to_string(a + 1) + " cannot be in layer 1");
  }
  if (layers.kappa() < 2) throw ValidationError("a layered graph needs at least two layers");

  std::vector<std::vector<AgentId>> adj(n);
  for (auto& [i, pair] : g.designated()) adj[i] = {pair.first, pair.second};

  const std::vector<int> comp = detail::strongly_connected_components(adj);
  std::map<int, std::vector<AgentId>> members;
  for (AgentId v = 0; v < n; ++v) members[comp[v]].push_back(v);
  auto in_cycle = [&](AgentId v) { return members[comp[v]].size() > 1; };

  ValidationReport report;
  std::map<AgentId, FollowerCheck> checks;
  for (AgentId i = g.leader_count(); i < n; ++i) {
    FollowerCheck c;
    c.agent = i;
    c.layer = layers[i];
    c.in_cycle = in_cycle(i);
    checks[i] = c;
  }

  // Cycle condition, checked once per strongly connected component.
  for (auto& [id, scc] : members) {
    if (scc.size() < 2) continue;
    int h_min = std::numeric_limits<int>::max();
    for (AgentId v : scc) h_min = std::min(h_min, layers[v]);
    std::vector<AgentId> candidates;
    for (AgentId a = 0; a < n; ++a)
      if (comp[a] != id && layers[a] < h_min) candidates.push_back(a);

    std::optional<NeighborPair> found;
    for (std::size_t x = 0; x < candidates.size() && !found; ++x)
      for (std::size_t y = x + 1; y < candidates.size() && !found; ++y) {
        const AgentId k = candidates[x], gg = candidates[y];
        bool ok = true;
        for (AgentId v : scc) {
          auto [a, b] = g.designated_pair(v);
          if (a != k && a != gg && b != k && b != gg) {
            ok = false;
            break;
          }
        }
        for (std::size_t s = 0; ok && s < scc.size(); ++s)
          ok = detail::disjoint_paths_to(adj, scc[s], {k, gg}) >= 2;
        if (ok) found = NeighborPair{k, gg};
      }

    for (AgentId v : scc) {
      FollowerCheck& c = checks[v];
      c.ok = found.has_value();
      c.anchors = found;
      if (!found)
        c.detail = "cycle is not two-reachable from two lower-layer agents it can access";
    }
  }

  // Acyclic followers: every designated neighbour lies lower, or on a cycle no higher.
  for (auto& [i, c] : checks) {
    if (c.in_cycle) continue;
    auto [a, b] = g.designated_pair(i);
    c.ok = true;
    for (AgentId j : {a, b}) {
      const bool lower = layers[j] < layers[i];
      const bool cyclic_not_higher = in_cycle(j) && layers[j] <= layers[i];
      if (!lower && !cyclic_not_higher) {
        c.ok = false;
        c.detail = "neighbour " + std::to_string(j + 1) + " is neither in a lower layer nor on a "
                   "cycle at or below layer " + std::to_string(c.layer);
      }
    }
  }

  report.accepted = true;
  for (auto& [i, c] : checks) {
    report.accepted = report.accepted && c.ok;
    report.followers.push_back(std::move(c));
  }
  return report;
}

/// Sensing graph plus the reversed follower-to-follower edges used for communication.
struct AugmentedGraph {
  SensingGraph base;
  std::set<Edge> extra_edges;

  std::set<Edge> edges() const {
    std::set<Edge> all = base.edges();
    all.insert(extra_edges.begin(), extra_edges.end());
    return all;
  }
};

inline AugmentedGraph augment(const SensingGraph& g) {
  std::set<Edge> extra;
  for (auto [i, j] : g.edges())
    if (!g.is_leader(i) && !g.is_leader(j) && !g.edges().contains({j, i})) extra.insert({j, i});
  return {g, std::move(extra)};
}

}  // namespace netloc

#endif  // NETLOC_GRAPH_HPP_
