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

// Random geometric test instances.
//
// n points are drawn uniformly on the unit square. Points i and j are joined
// by both directed edges when either is among the q nearest neighbors of the
// other (distance ties go to the smaller index). Capacities are log-uniform on
// [0.5, 5] and utility weights log-uniform on [0.3, 3].
//
// Draw order from a single Xoshiro256 stream seeded with `seed`: point
// coordinates (x then y, point by point), redrawn as a whole while the graph
// is disconnected; then one capacity per directed edge in edge order; then
// the off-diagonal weights in row-major order.

#ifndef PDMCF_GENERATOR_HPP_
#define PDMCF_GENERATOR_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdmcf/graph.hpp"
#include "pdmcf/instance.hpp"
#include "pdmcf/matrix.hpp"
#include "pdmcf/random.hpp"
#include "pdmcf/utilities.hpp"

namespace pdmcf {

inline constexpr double kMinCapacity = 0.5;
inline constexpr double kMaxCapacity = 5.0;
inline constexpr double kMinWeight = 0.3;
inline constexpr double kMaxWeight = 3.0;
inline constexpr int kMaxConnectivityAttempts = 1000;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Undirected pairs (i < j) of the symmetric q-nearest-neighbor graph, sorted.
inline std::vector<std::pair<int, int>> NearestNeighborPairs(
    const std::vector<Point2>& points, int q) {
  const int n = static_cast<int>(points.size());
  std::vector<char> adjacent(points.size() * points.size(), 0);
  std::vector<int> order;
  std::vector<double> dist(points.size());
  for (int j = 0; j < n; ++j) {
    order.clear();
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      const double dx = points[i].x - points[j].x;
      const double dy = points[i].y - points[j].y;
      dist[static_cast<std::size_t>(i)] = dx * dx + dy * dy;
      order.push_back(i);
    }
    const auto closer = [&](int a, int b) {
      const double da = dist[static_cast<std::size_t>(a)];
      const double db = dist[static_cast<std::size_t>(b)];
      return da < db || (da == db && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + q, order.end(), closer);
    for (int k = 0; k < q; ++k) {
      const int i = order[static_cast<std::size_t>(k)];
      adjacent[static_cast<std::size_t>(std::min(i, j) * n + std::max(i, j))] =
          1;
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (adjacent[static_cast<std::size_t>(i * n + j)]) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

inline ProblemInstance GenerateInstance(int n, int q, std::uint64_t seed,
                                        UtilityFamily family = UtilityFamily::Log()) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (q < 1 || q >= n) throw std::invalid_argument("q must lie in [1, n)");
  family.Validate();

  Xoshiro256 rng(seed);
  std::vector<Point2> points(static_cast<std::size_t>(n));
  for (int attempt = 0; attempt < kMaxConnectivityAttempts; ++attempt) {
    for (auto& p : points) {
      p.x = rng.Uniform();
      p.y = rng.Uniform();
    }
    const auto pairs = NearestNeighborPairs(points, q);
    std::vector<Edge> edges;
    edges.reserve(2 * pairs.size());
    for (const auto& [i, j] : pairs) {
      edges.push_back({i, j});
      edges.push_back({j, i});
    }
    // Both directions are present, so weak and strong connectivity coincide.
    const Topology probe(n, edges, std::vector<double>(edges.size(), 1.0));
    if (!IsStronglyConnected(probe)) continue;

    std::vector<double> caps(edges.size());
    for (double& c : caps) c = rng.LogUniform(kMinCapacity, kMaxCapacity);
    Matrix weights(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < weights.rows(); ++i) {
      for (std::size_t j = 0; j < weights.cols(); ++j) {
        if (i != j) weights(i, j) = rng.LogUniform(kMinWeight, kMaxWeight);
      }
    }
    return {Topology(n, std::move(edges), std::move(caps)),
            UtilitySpec{family, std::move(weights)}};
  }
  throw std::runtime_error("no connected point set after " +
                           std::to_string(kMaxConnectivityAttempts) +
                           " attempts");
}

// Multiplies each off-diagonal weight by (1 + nu) or (1 - nu), each with
// probability one half, in row-major order.
inline UtilitySpec PerturbWeights(const UtilitySpec& spec, double nu,
                                  std::uint64_t seed) {
  if (!(nu >= 0.0 && nu < 1.0)) {
    throw std::invalid_argument("perturbation ratio must lie in [0, 1)");
  }
  Xoshiro256 rng(seed);
  UtilitySpec out = spec;
  for (std::size_t i = 0; i < out.weights.rows(); ++i) {
    for (std::size_t j = 0; j < out.weights.cols(); ++j) {
      if (i == j) continue;
      out.weights(i, j) *= rng.Coin() ? 1.0 + nu : 1.0 - nu;
    }
  }
  return out;
}

}  // namespace pdmcf

#endif  // PDMCF_GENERATOR_HPP_
