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

// Optimality residual of a point Q with F = Pi(Q):
//
//   r(Q) = min_{gamma >= 0} ||G - gamma (F - Q)||_F^2   if -F A^T has positive
//                                                      off-diagonal entries,
//   r(Q) = +inf                                         otherwise,
//
// where G = U' A is the gradient of -U(-F A^T) with respect to F. F is optimal
// exactly when r(Q) = 0: it is then a fixed point of a projected gradient step.

#ifndef PDMCF_RESIDUAL_HPP_
#define PDMCF_RESIDUAL_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>

#include "pdmcf/graph.hpp"
#include "pdmcf/matrix.hpp"
#include "pdmcf/projection.hpp"
#include "pdmcf/utilities.hpp"

namespace pdmcf {

struct ResidualReport {
  bool finite = false;
  double value = std::numeric_limits<double>::infinity();
  // Fraction of off-diagonal traffic entries that are <= 0.
  double infeasible_fraction = 1.0;
  // Minimizing multiplier gamma; 0 when the unconstrained branch applies.
  double residual_gamma = 0.0;
};

// Below this ||F - Q||_F^2 the F = Q branch is taken.
inline constexpr double kCoincidentSquaredDistance = 1e-24;

inline double InfeasibleFraction(const Matrix& traffic) {
  const std::size_t n = traffic.rows();
  if (n < 2) return 0.0;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && !(traffic(i, j) > 0.0)) ++bad;
    }
  }
  return static_cast<double>(bad) / static_cast<double>(n * (n - 1));
}

// G = U' A, the gradient of -U(-F A^T) in F at the given traffic matrix.
inline Matrix UtilityGradient(const Matrix& traffic, const Topology& topo,
                              const UtilitySpec& spec) {
  return DualTimesIncidence(UtilityDerivative(traffic, spec), topo);
}

// Residual at q when flows = Pi(q) and traffic = -flows A^T are already known.
inline ResidualReport EvaluateResidual(const Matrix& q, const Matrix& flows,
                                       const Matrix& traffic,
                                       const Topology& topo,
                                       const UtilitySpec& spec) {
  RequireShape(q, topo.n(), topo.m(), "EvaluateResidual");
  RequireShape(flows, topo.n(), topo.m(), "EvaluateResidual");
  ResidualReport report;
  report.infeasible_fraction = InfeasibleFraction(traffic);
  if (report.infeasible_fraction > 0.0) return report;

  const Matrix grad = UtilityGradient(traffic, topo, spec);
  const auto g = grad.values();
  const auto f = flows.values();
  const auto qv = q.values();
  double grad_sq = 0.0;
  double inner = 0.0;
  double step_sq = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double d = f[k] - qv[k];
    grad_sq += g[k] * g[k];
    inner += g[k] * d;
    step_sq += d * d;
  }

  report.finite = true;
  report.value = grad_sq;
  if (step_sq >= kCoincidentSquaredDistance && inner >= 0.0) {
    report.residual_gamma = inner / step_sq;
    report.value = std::max(0.0, grad_sq - inner * report.residual_gamma);
  }
  return report;
}

inline ResidualReport OptimalityResidual(const Matrix& q, const Topology& topo,
                                         const UtilitySpec& spec) {
  const Matrix flows = ProjectFlows(q, topo);
  const Matrix traffic = FlowsToTraffic(flows, topo);
  return EvaluateResidual(q, flows, traffic, topo, spec);
}

}  // namespace pdmcf

#endif  // PDMCF_RESIDUAL_HPP_
