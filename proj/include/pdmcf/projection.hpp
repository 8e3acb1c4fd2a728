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

#ifndef PDMCF_PROJECTION_HPP_
#define PDMCF_PROJECTION_HPP_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pdmcf/graph.hpp"
#include "pdmcf/matrix.hpp"
#include "pdmcf/parallel.hpp"

namespace pdmcf {

// Computes the threshold mu >= 0 of the Euclidean projection of `values` onto
// {x >= 0, sum(x) <= cap}, which is (values - mu)_+. `scratch` is resized and
// overwritten.
//
// When (values)_+ already fits, mu = 0. Otherwise, with v' the values sorted
// in decreasing order and S_t the sum of the top t, mu = (S_t - cap) / t for
// the largest t with v'_t > (S_t - cap) / t. That condition holds exactly on a
// prefix t = 1..t*, so the scan stops at the first failure.
inline double SimplexThreshold(std::span<const double> values, double cap,
                               std::vector<double>& scratch) {
  if (!(cap > 0.0)) throw std::invalid_argument("capacity must be positive");
  double positive_sum = 0.0;
  std::size_t positive_count = 0;
  for (double v : values) {
    if (v > 0.0) {
      positive_sum += v;
      ++positive_count;
    }
  }
  if (positive_sum <= cap) return 0.0;

  // mu is at least the candidate over all positive entries, so anything at or
  // below that bound is clipped and never reaches the sorted prefix.
  const double floor =
      (positive_sum - cap) / static_cast<double>(positive_count);
  scratch.clear();
  for (double v : values) {
    if (v > floor) scratch.push_back(v);
  }
  std::sort(scratch.begin(), scratch.end(), std::greater<>());
  double prefix = 0.0;
  double mu = floor;
  for (std::size_t t = 0; t < scratch.size(); ++t) {
    const double candidate =
        (prefix + scratch[t] - cap) / static_cast<double>(t + 1);
    if (!(scratch[t] - candidate > 0.0)) break;
    prefix += scratch[t];
    mu = candidate;
  }
  return std::max(mu, 0.0);
}

struct SimplexProjection {
  std::vector<double> point;
  double mu = 0.0;
};

inline SimplexProjection ProjectSimplexColumn(std::span<const double> values,
                                              double cap) {
  std::vector<double> scratch;
  SimplexProjection result;
  result.mu = SimplexThreshold(values, cap, scratch);
  result.point.reserve(values.size());
  for (double v : values) result.point.push_back(std::max(v - result.mu, 0.0));
  return result;
}

// Projection onto {F >= 0, F^T 1 <= c}: every column is projected onto its own
// scaled simplex. F is row-major, so the columns are projected as rows of the
// transpose.
inline Matrix ProjectFlows(const Matrix& q, const Topology& topo) {
  RequireShape(q, topo.n(), topo.m(), "ProjectFlows");
  Matrix by_edge = Transpose(q);
  ParallelFor(topo.m(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> scratch;
    for (std::size_t l = begin; l < end; ++l) {
      auto column = by_edge.row(l);
      const double mu = SimplexThreshold(column, topo.capacity(l), scratch);
      for (double& v : column) v = std::max(v - mu, 0.0);
    }
  });
  return Transpose(by_edge);
}

}  // namespace pdmcf

#endif  // PDMCF_PROJECTION_HPP_
