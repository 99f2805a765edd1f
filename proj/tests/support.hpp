#ifndef NETLOC_TESTS_SUPPORT_HPP_
#define NETLOC_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "netloc/netloc.hpp"

namespace netloc::testing {

inline const nlohmann::json& oracle() {
  static const nlohmann::json data = [] {
    std::ifstream in(NETLOC_ORACLE_PATH);
    return nlohmann::json::parse(in);
  }();
  return data;
}

inline Complex as_complex(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline std::string scenario_path(const std::string& name) {
  return std::string(NETLOC_SCENARIO_DIR) + "/" + name;
}

// Six-agent example network: leaders 1, 2; followers 3..6 (zero-based 2..5).
inline std::vector<ComplexPoint> fig3_positions() {
  return {{1, 3}, {3, 1}, {-2, 2}, {-4, 1}, {-4, 0}, {2, -2}};
}

inline std::map<AgentId, NeighborPair> fig3_designated() {
  return {{2, {0, 5}}, {3, {5, 4}}, {4, {2, 5}}, {5, {1, 2}}};
}

inline SensingGraph fig3_graph() { return SensingGraph::from_designated(6, 2, fig3_designated()); }

inline LayerAssignment fig3_layers() {
  return LayerAssignment::from_layers(6, {{0, 1}, {2, 5}, {4}, {3}});
}

inline std::vector<FrameOrientation> identity_frames(std::size_t n) {
  return std::vector<FrameOrientation>(n);
}

inline std::vector<FrameOrientation> random_frames(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> ang(-10.0, 10.0), amp(0.0, 0.5), om(0.0, 2.0);
  std::vector<FrameOrientation> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(ang(rng), amp(rng), om(rng));
  return out;
}

inline ComplexPoint random_point(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng)};
}

/// Points in a box with a minimum pairwise separation.
inline std::vector<ComplexPoint> random_points(std::mt19937_64& rng, std::size_t n, double scale,
                                               double min_sep) {
  std::vector<ComplexPoint> pts;
  while (pts.size() < n) {
    const ComplexPoint p = random_point(rng, scale);
    bool ok = true;
    for (auto q : pts) ok = ok && std::abs(p - q) >= min_sep;
    if (ok) pts.push_back(p);
  }
  return pts;
}

struct RandomNetwork {
  SensingGraph graph;
  LayerAssignment layers;
};

/// Layered network built so that it satisfies the layered-graph conditions:
/// acyclic followers take both neighbours from lower layers; some same-layer
/// follower pairs form two-cycles anchored at distinct lower agents.
inline RandomNetwork constructive_layered(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<int> coin(0, 2);
  std::vector<int> layer(n, 1);
  std::vector<std::vector<AgentId>> by_layer{{}};
  for (AgentId a = 0; a < m; ++a) by_layer[0].push_back(a);
  int h = 2;
  for (AgentId f = m; f < n; ++f) {
    if (by_layer.size() < static_cast<std::size_t>(h)) by_layer.emplace_back();
    layer[f] = h;
    by_layer[static_cast<std::size_t>(h) - 1].push_back(f);
    if (coin(rng) == 0) ++h;
  }
  auto lower_than = [&](int lh) {
    std::vector<AgentId> out;
    for (AgentId a = 0; a < n; ++a)
      if (layer[a] < lh) out.push_back(a);
    return out;
  };
  auto pick2 = [&](const std::vector<AgentId>& from) {
    std::vector<AgentId> c = from;
    std::shuffle(c.begin(), c.end(), rng);
    return NeighborPair{c[0], c[1]};
  };

  std::map<AgentId, NeighborPair> des;
  for (std::size_t hl = 1; hl < by_layer.size(); ++hl) {
    auto members = by_layer[hl];
    std::shuffle(members.begin(), members.end(), rng);
    const auto lower = lower_than(static_cast<int>(hl) + 1);
    std::size_t idx = 0;
    while (idx < members.size()) {
      if (idx + 1 < members.size() && coin(rng) == 0) {
        const AgentId i = members[idx], j = members[idx + 1];
        const auto [a, b] = pick2(lower);
        des[i] = {j, a};
        des[j] = {i, b};
        idx += 2;
      } else {
        des[members[idx]] = pick2(lower);
        ++idx;
      }
    }
  }
  std::vector<std::vector<AgentId>> layers;
  for (auto& l : by_layer)
    if (!l.empty()) layers.push_back(l);
  return {SensingGraph::from_designated(n, m, des), LayerAssignment::from_layers(n, layers)};
}

/// Arbitrary designated pairs and layers; many of these are rejected.
inline RandomNetwork arbitrary_layered(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<AgentId> any(0, n - 1);
  std::map<AgentId, NeighborPair> des;
  for (AgentId f = m; f < n; ++f) {
    AgentId j, k;
    do j = any(rng); while (j == f);
    do k = any(rng); while (k == f || k == j);
    des[f] = {j, k};
  }
  std::uniform_int_distribution<int> lay(2, static_cast<int>(std::max<std::size_t>(2, n - m + 1)));
  std::vector<int> layer(n, 1);
  for (AgentId f = m; f < n; ++f) layer[f] = lay(rng);
  std::vector<int> compact(layer);
  // close gaps so layer labels are contiguous
  std::vector<int> used(*std::max_element(layer.begin(), layer.end()) + 1, 0);
  for (int l : layer) used[static_cast<std::size_t>(l)] = 1;
  std::vector<int> remap(used.size(), 0);
  int next = 0;
  for (std::size_t l = 1; l < used.size(); ++l)
    if (used[l]) remap[l] = ++next;
  for (auto& l : compact) l = remap[static_cast<std::size_t>(l)];
  return {SensingGraph::from_designated(n, m, des), LayerAssignment(compact)};
}

inline ConstraintMatrices matrices_at(const SensingGraph& g, std::span<const ComplexPoint> pts,
                                      std::span<const FrameOrientation> frames,
                                      MeasurementMode mode = MeasurementMode::LocalRelPos,
                                      double t = 0.0) {
  const Configuration c({pts.begin(), pts.end()}, g.leader_count());
  return assemble_constraints(g, measure_constraints(g, c, frames, mode, t));
}

}  // namespace netloc::testing

#endif  // NETLOC_TESTS_SUPPORT_HPP_
