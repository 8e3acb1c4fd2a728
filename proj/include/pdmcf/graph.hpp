// Copyright 2026 The pdmcf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Directed network with capacitated edges. The node-edge incidence matrix A
// (n x m, +1 where an edge enters a node, -1 where it leaves) is never stored;
// products with A and A^T are computed by walking the edge list.
//
// Flow matrices F are n x m with one row per destination: F(i, l) is the flow
// on edge l destined to node i. The traffic matrix T = -F A^T is n x n with
// T(i, j) the traffic from source j to destination i and T(i, i) equal to the
// negated row sum of the off-diagonal entries.

#ifndef PDMCF_GRAPH_HPP_
#define PDMCF_GRAPH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdmcf/matrix.hpp"
#include "pdmcf/parallel.hpp"

namespace pdmcf {

struct Edge {
  int tail = 0;
  int head = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class Topology {
 public:
  Topology() = default;

  // Validates node ranges, self-loops, duplicate parallel edges and
  // capacities. Strong connectivity is checked separately (see
  // IsStronglyConnected) so that disconnected graphs can still be inspected.
  Topology(int num_nodes, std::vector<Edge> edges, std::vector<double> caps)
      : n_(num_nodes), edges_(std::move(edges)), caps_(std::move(caps)) {
    if (n_ < 1) throw std::invalid_argument("topology needs at least 1 node");
    if (edges_.size() != caps_.size()) {
      throw std::invalid_argument("edge and capacity counts differ");
    }
    std::set<std::pair<int, int>> seen;
    degree_.assign(static_cast<std::size_t>(n_), 0);
    for (std::size_t l = 0; l < edges_.size(); ++l) {
      const Edge& e = edges_[l];
      if (e.tail < 0 || e.tail >= n_ || e.head < 0 || e.head >= n_) {
        throw std::invalid_argument("edge " + std::to_string(l) +
                                    " has a node index out of range");
      }
      if (e.tail == e.head) {
        throw std::invalid_argument("edge " + std::to_string(l) +
                                    " is a self-loop");
      }
      if (!seen.emplace(e.tail, e.head).second) {
        throw std::invalid_argument("edge " + std::to_string(l) +
                                    " duplicates an earlier edge");
      }
      if (!(caps_[l] > 0.0) || !std::isfinite(caps_[l])) {
        throw std::invalid_argument("edge " + std::to_string(l) +
                                    " has a nonpositive capacity");
      }
      ++degree_[static_cast<std::size_t>(e.tail)];
      ++degree_[static_cast<std::size_t>(e.head)];
    }
  }

  int num_nodes() const { return n_; }
  std::size_t n() const { return static_cast<std::size_t>(n_); }
  std::size_t m() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(std::size_t l) const { return edges_[l]; }
  std::span<const double> capacities() const { return caps_; }
  double capacity(std::size_t l) const { return caps_[l]; }
  // Number of incident edges, in plus out; the diagonal of A A^T.
  int degree(std::size_t node) const { return degree_[node]; }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> caps_;
  std::vector<int> degree_;
};

// T = -F A^T by scattering each edge's flow into its tail (+) and head (-).
inline Matrix FlowsToTraffic(const Matrix& flows, const Topology& topo) {
  RequireShape(flows, topo.n(), topo.m(), "FlowsToTraffic");
  const std::size_t n = topo.n();
  const auto edges = topo.edges();
  Matrix traffic(n, n);
  ParallelFor(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto f = flows.row(i);
      auto t = traffic.row(i);
      for (std::size_t l = 0; l < edges.size(); ++l) {
        t[static_cast<std::size_t>(edges[l].tail)] += f[l];
        t[static_cast<std::size_t>(edges[l].head)] -= f[l];
      }
    }
  });
  return traffic;
}

// Y A by gathering Y(i, head) - Y(i, tail) for each edge.
inline Matrix DualTimesIncidence(const Matrix& dual, const Topology& topo) {
  RequireShape(dual, topo.n(), topo.n(), "DualTimesIncidence");
  const std::size_t n = topo.n();
  const auto edges = topo.edges();
  Matrix out(n, topo.m());
  ParallelFor(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto y = dual.row(i);
      auto o = out.row(i);
      for (std::size_t l = 0; l < edges.size(); ++l) {
        o[l] = y[static_cast<std::size_t>(edges[l].head)] -
               y[static_cast<std::size_t>(edges[l].tail)];
      }
    }
  });
  return out;
}

inline int MaxDegree(const Topology& topo) {
  int d = 0;
  for (std::size_t i = 0; i < topo.n(); ++i) d = std::max(d, topo.degree(i));
  return d;
}

// eta = 1 / sqrt(2 d_max). Since lambda_max(A A^T) <= 2 d_max this satisfies
// eta <= 1 / ||A||_2, so alpha * beta = eta^2 is a valid PDHG step product.
inline double StepSizeEta(const Topology& topo) {
  const int d = MaxDegree(topo);
  if (d == 0) throw std::invalid_argument("topology has no edges");
  return 1.0 / std::sqrt(2.0 * static_cast<double>(d));
}

namespace internal {

// Visits nodes reachable from source along edges (forward) or against them.
inline std::vector<char> Reachable(const Topology& topo, int source,
                                   bool forward) {
  std::vector<std::vector<int>> adj(topo.n());
  for (const Edge& e : topo.edges()) {
    if (forward) {
      adj[static_cast<std::size_t>(e.tail)].push_back(e.head);
    } else {
      adj[static_cast<std::size_t>(e.head)].push_back(e.tail);
    }
  }
  std::vector<char> seen(topo.n(), 0);
  std::vector<int> stack = {source};
  seen[static_cast<std::size_t>(source)] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace internal

inline bool IsStronglyConnected(const Topology& topo) {
  if (topo.n() == 0) return false;
  const auto all = [](const std::vector<char>& v) {
    return std::all_of(v.begin(), v.end(), [](char c) { return c != 0; });
  };
  return all(internal::Reachable(topo, 0, true)) &&
         all(internal::Reachable(topo, 0, false));
}

// Scaled shortest-path flow: one unit from every source to every destination
// along a fewest-hop path, then scaled by alpha = 1 / max_l(load_l / c_l) so
// that every edge is within capacity. The result is feasible and its traffic
// matrix has every off-diagonal entry equal to alpha.
//
// Paths toward destination i come from a BFS over reversed edges; node j takes
// the out-edge to the lowest-id neighbor one hop closer to i.
inline Matrix ShortestPathFlow(const Topology& topo) {
  if (!IsStronglyConnected(topo)) {
    throw std::invalid_argument("topology is not strongly connected");
  }
  const std::size_t n = topo.n();
  const std::size_t m = topo.m();
  std::vector<std::vector<std::size_t>> in_edges(n), out_edges(n);
  for (std::size_t l = 0; l < m; ++l) {
    out_edges[static_cast<std::size_t>(topo.edge(l).tail)].push_back(l);
    in_edges[static_cast<std::size_t>(topo.edge(l).head)].push_back(l);
  }

  Matrix flows(n, m);
  constexpr int kUnreached = std::numeric_limits<int>::max();
  std::vector<int> dist(n);
  std::vector<std::size_t> order;
  std::vector<double> load(n);
  order.reserve(n);
  for (std::size_t dest = 0; dest < n; ++dest) {
    std::fill(dist.begin(), dist.end(), kUnreached);
    order.clear();
    dist[dest] = 0;
    order.push_back(dest);
    for (std::size_t q = 0; q < order.size(); ++q) {
      const std::size_t v = order[q];
      for (std::size_t l : in_edges[v]) {
        const auto u = static_cast<std::size_t>(topo.edge(l).tail);
        if (dist[u] == kUnreached) {
          dist[u] = dist[v] + 1;
          order.push_back(u);
        }
      }
    }
    std::fill(load.begin(), load.end(), 1.0);
    // Farthest nodes first, so each node's load is complete when forwarded.
    for (std::size_t q = order.size(); q-- > 1;) {
      const std::size_t v = order[q];
      std::size_t best_edge = m;
      int best_head = kUnreached;
      for (std::size_t l : out_edges[v]) {
        const int h = topo.edge(l).head;
        if (dist[static_cast<std::size_t>(h)] == dist[v] - 1 && h < best_head) {
          best_head = h;
          best_edge = l;
        }
      }
      flows(dest, best_edge) += load[v];
      load[static_cast<std::size_t>(best_head)] += load[v];
    }
  }

  double worst = 0.0;
  for (std::size_t l = 0; l < m; ++l) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += flows(i, l);
    worst = std::max(worst, col / topo.capacity(l));
  }
  if (worst > 0.0) {
    const double alpha = 1.0 / worst;
    for (double& v : flows.values()) v *= alpha;
  }
  return flows;
}

}  // namespace pdmcf

#endif  // PDMCF_GRAPH_HPP_
