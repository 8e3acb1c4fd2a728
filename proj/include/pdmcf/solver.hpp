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

// Primal-dual hybrid gradient for the all-pairs flow problem, applied to the
// saddle function
//
//   L(F; Y) = -(-U)^*(Y) + I_F(F) - Tr Y^T F A^T.
//
// One iteration, with step sizes alpha = eta / omega and beta = eta * omega:
//
//   F_hat    = Pi(F_half + alpha Y A)
//   F_next   = 2 F_hat - F_half
//   Y_hat    = prox_{beta (-U)^*}(Y - beta F_next A^T)   (diagonal forced to 0)
//   F_half  <- rho F_hat + (1 - rho) F_half
//   Y       <- rho Y_hat + (1 - rho) Y
//
// Every k_adapt iterations the primal weight moves toward the ratio of the
// last dual and primal displacements. The residual of Q = F_half + alpha Y A
// is checked every k_check iterations; the solver returns F_hat = Pi(Q) once
// it falls below n m epsilon.

#ifndef PDMCF_SOLVER_HPP_
#define PDMCF_SOLVER_HPP_

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdmcf/generator.hpp"
#include "pdmcf/graph.hpp"
#include "pdmcf/instance.hpp"
#include "pdmcf/matrix.hpp"
#include "pdmcf/projection.hpp"
#include "pdmcf/residual.hpp"
#include "pdmcf/utilities.hpp"

namespace pdmcf {

// Stopping threshold used when none is given: 0.01 / (n (n - 1)).
inline double DefaultEpsilon(std::size_t n) {
  return 0.01 / (static_cast<double>(n) * static_cast<double>(n - 1));
}

struct SolverConfig {
  // Per-entry residual threshold; the solver stops once r < n m epsilon.
  // Unset means DefaultEpsilon(n).
  std::optional<double> epsilon;
  double rho = 1.9;
  double theta = 0.5;
  std::int64_t k_adapt = 100;
  double tau = 1e-5;
  std::int64_t k_check = 25;
  std::int64_t max_iters = 1'000'000;
  double omega0 = 1.0;
  // Iteration after which omega stays fixed; negative means never.
  std::int64_t freeze_adaptation_after = -1;
  // Disables primal-weight updates entirely (omega stays at its start value).
  bool adapt = true;

  void Validate() const {
    if (epsilon && !(*epsilon > 0.0)) {
      throw std::invalid_argument("epsilon must be positive");
    }
    if (!(rho > 0.0 && rho < 2.0)) {
      throw std::invalid_argument("rho must lie in (0, 2)");
    }
    if (!(theta >= 0.0 && theta <= 1.0)) {
      throw std::invalid_argument("theta must lie in [0, 1]");
    }
    if (k_adapt < 1) throw std::invalid_argument("k_adapt must be >= 1");
    if (k_check < 1) throw std::invalid_argument("k_check must be >= 1");
    if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
      throw std::invalid_argument("omega0 must be positive");
    }
  }

  double ResolvedEpsilon(std::size_t n) const {
    return epsilon.value_or(DefaultEpsilon(n));
  }
};

struct SolverState {
  Matrix flows_half;  // F^{k-1/2}
  Matrix dual;        // Y^k
  double eta = 0.0;
  double omega = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::int64_t iter = 0;
  // Displacements of the last completed iteration.
  double delta_flows = 0.0;
  double delta_dual = 0.0;
};

// Initial point for a solve: F^{-1/2}, Y^0 and omega^0.
struct WarmStart {
  Matrix flows;
  Matrix dual;
  double omega = 1.0;
};

struct TraceRecord {
  std::int64_t iter = 0;
  double residual = std::numeric_limits<double>::infinity();
  double infeasible_fraction = 1.0;
  double omega = 1.0;
  // NaN when the traffic matrix is outside the utility domain.
  double utility = std::numeric_limits<double>::quiet_NaN();
};

struct Solution {
  Matrix flows;
  Matrix traffic;
  Matrix dual;
  std::int64_t iterations = 0;
  double final_residual = std::numeric_limits<double>::infinity();
  double utility = std::numeric_limits<double>::quiet_NaN();
  double omega = 1.0;
  double threshold = 0.0;  // n m epsilon
  double seconds = 0.0;
  bool converged = false;
  std::vector<TraceRecord> trace;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Q = F_half + alpha Y A and its projection F_hat = Pi(Q).
struct PrimalStep {
  Matrix q;
  Matrix projected;
};

inline SolverState InitialState(const ProblemInstance& instance,
                                const SolverConfig& config,
                                const WarmStart* warm = nullptr) {
  const std::size_t n = instance.n();
  const std::size_t m = instance.m();
  SolverState state;
  state.eta = StepSizeEta(instance.topology);
  if (warm != nullptr) {
    RequireShape(warm->flows, n, m, "warm start flows");
    RequireShape(warm->dual, n, n, "warm start dual");
    if (!(warm->omega > 0.0) || !std::isfinite(warm->omega)) {
      throw std::invalid_argument("warm start omega must be positive");
    }
    state.flows_half = warm->flows;
    state.dual = warm->dual;
    state.omega = warm->omega;
  } else {
    // F = 0, Y = I - 1 1^T.
    state.flows_half = Matrix(n, m);
    state.dual = Matrix(n, n, -1.0);
    for (std::size_t i = 0; i < n; ++i) state.dual(i, i) = 0.0;
    state.omega = config.omega0;
  }
  state.alpha = state.eta / state.omega;
  state.beta = state.eta * state.omega;
  return state;
}

inline PrimalStep ComputePrimalStep(const SolverState& state,
                                    const ProblemInstance& instance) {
  PrimalStep step;
  step.q = DualTimesIncidence(state.dual, instance.topology);
  auto qv = step.q.values();
  const auto fv = state.flows_half.values();
  for (std::size_t k = 0; k < qv.size(); ++k) {
    qv[k] = fv[k] + state.alpha * qv[k];
  }
  step.projected = ProjectFlows(step.q, instance.topology);
  return step;
}

// Finishes an iteration from its primal projection: dual prox step, then
// over-relaxation of both iterates. Records the displacements and advances
// the counter; step sizes are left alone.
inline void CompleteIteration(SolverState& state, const Matrix& projected,
                              const ProblemInstance& instance, double rho) {
  const std::size_t n = instance.n();
  Matrix extrapolated(n, instance.m());
  {
    auto ev = extrapolated.values();
    const auto pv = projected.values();
    const auto fv = state.flows_half.values();
    for (std::size_t k = 0; k < ev.size(); ++k) ev[k] = 2.0 * pv[k] - fv[k];
  }
  // Y - beta F_next A^T = Y + beta T(F_next).
  Matrix dual_in = FlowsToTraffic(extrapolated, instance.topology);
  {
    auto dv = dual_in.values();
    const auto yv = state.dual.values();
    for (std::size_t k = 0; k < dv.size(); ++k) {
      dv[k] = yv[k] + state.beta * dv[k];
    }
  }
  const Matrix dual_hat =
      ProxConjugateMatrix(dual_in, state.beta, instance.utility);

  double df = 0.0;
  {
    auto fv = state.flows_half.values();
    const auto pv = projected.values();
    for (std::size_t k = 0; k < fv.size(); ++k) {
      const double next = rho * pv[k] + (1.0 - rho) * fv[k];
      const double d = next - fv[k];
      df += d * d;
      fv[k] = next;
    }
  }
  double dy = 0.0;
  {
    auto yv = state.dual.values();
    const auto hv = dual_hat.values();
    for (std::size_t k = 0; k < yv.size(); ++k) {
      const double next = rho * hv[k] + (1.0 - rho) * yv[k];
      const double d = next - yv[k];
      dy += d * d;
      yv[k] = next;
    }
  }
  state.delta_flows = std::sqrt(df);
  state.delta_dual = std::sqrt(dy);
  ++state.iter;
}

// One full over-relaxed PDHG update without step-size adaptation.
inline SolverState PdhgIteration(SolverState state,
                                 const ProblemInstance& instance,
                                 double rho) {
  const PrimalStep step = ComputePrimalStep(state, instance);
  CompleteIteration(state, step.projected, instance, rho);
  return state;
}

// omega <- (delta_dual / delta_flows)^theta omega^(1 - theta) when both
// displacements exceed tau; alpha and beta follow omega. Returns whether an
// update happened.
inline bool AdaptStepSizes(SolverState& state, double delta_flows,
                           double delta_dual, const SolverConfig& config) {
  if (!(delta_flows > config.tau && delta_dual > config.tau)) return false;
  state.omega = std::pow(delta_dual / delta_flows, config.theta) *
                std::pow(state.omega, 1.0 - config.theta);
  state.alpha = state.eta / state.omega;
  state.beta = state.eta * state.omega;
  return true;
}

class PdmcfSolver {
 public:
  PdmcfSolver(const ProblemInstance& instance, SolverConfig config,
              const WarmStart* warm = nullptr)
      : instance_(instance), config_(std::move(config)) {
    instance_.Validate();
    config_.Validate();
    state_ = InitialState(instance_, config_, warm);
  }

  const SolverState& state() const { return state_; }
  const SolverConfig& config() const { return config_; }

  // Completes the iteration whose primal step is given and applies the
  // primal-weight schedule (iteration k adapts when k is a multiple of
  // k_adapt, including k = 0).
  void Advance(const PrimalStep& step) {
    const std::int64_t k = state_.iter;
    CompleteIteration(state_, step.projected, instance_, config_.rho);
    if (!AllFinite(state_.flows_half) || !AllFinite(state_.dual)) {
      throw NumericalError("non-finite iterate at iteration " +
                           std::to_string(k));
    }
    const bool frozen = config_.freeze_adaptation_after >= 0 &&
                        k >= config_.freeze_adaptation_after;
    if (config_.adapt && !frozen && k % config_.k_adapt == 0) {
      AdaptStepSizes(state_, state_.delta_flows, state_.delta_dual, config_);
    }
  }

  Solution Solve() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = instance_.n();
    const std::size_t m = instance_.m();
    Solution sol;
    sol.threshold = static_cast<double>(n) * static_cast<double>(m) *
                    config_.ResolvedEpsilon(n);

    std::optional<PrimalStep> best;
    Matrix best_dual;
    double best_omega = state_.omega;
    std::int64_t best_iter = 0;
    bool done = false;
    while (!done) {
      PrimalStep step = ComputePrimalStep(state_, instance_);
      const std::int64_t k = state_.iter;
      const bool at_cap = k >= config_.max_iters;
      if (k % config_.k_check == 0 || at_cap) {
        const Matrix traffic = FlowsToTraffic(step.projected,
                                              instance_.topology);
        const ResidualReport report = EvaluateResidual(
            step.q, step.projected, traffic, instance_.topology,
            instance_.utility);
        TraceRecord rec;
        rec.iter = k;
        rec.residual = report.value;
        rec.infeasible_fraction = report.infeasible_fraction;
        rec.omega = state_.omega;
        if (auto u = TotalUtility(traffic, instance_.utility)) rec.utility = *u;
        sol.trace.push_back(rec);

        if (report.finite && (!best || report.value < sol.final_residual)) {
          sol.final_residual = report.value;
          best_iter = k;
          best_dual = state_.dual;
          best_omega = state_.omega;
          best = step;
        }
        if (report.finite && report.value < sol.threshold) {
          sol.converged = true;
          done = true;
        } else if (at_cap) {
          done = true;
        }
      }
      if (!done) Advance(step);
    }

    if (best) {
      sol.flows = std::move(best->projected);
      sol.dual = std::move(best_dual);
      sol.omega = best_omega;
      sol.iterations = sol.converged ? state_.iter : best_iter;
    } else {
      // Never reached the utility domain; report the last projection.
      sol.flows = ComputePrimalStep(state_, instance_).projected;
      sol.dual = state_.dual;
      sol.omega = state_.omega;
      sol.iterations = state_.iter;
    }
    sol.traffic = FlowsToTraffic(sol.flows, instance_.topology);
    if (auto u = TotalUtility(sol.traffic, instance_.utility)) {
      sol.utility = *u;
    }
    sol.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    return sol;
  }

  // Iterates until the projected flow's traffic matrix has every off-diagonal
  // entry positive and returns that flow with the current dual and primal
  // weight. Throws if this does not happen within max_iters.
  WarmStart RunUntilFeasible(std::int64_t* iterations = nullptr) {
    while (state_.iter <= config_.max_iters) {
      PrimalStep step = ComputePrimalStep(state_, instance_);
      const Matrix traffic =
          FlowsToTraffic(step.projected, instance_.topology);
      if (InfeasibleFraction(traffic) == 0.0) {
        if (iterations != nullptr) *iterations = state_.iter;
        return {std::move(step.projected), state_.dual, state_.omega};
      }
      Advance(step);
    }
    throw std::runtime_error("no feasible iterate within max_iters");
  }

 private:
  ProblemInstance instance_;
  SolverConfig config_;
  SolverState state_;
};

inline Solution Solve(const ProblemInstance& instance,
                      const SolverConfig& config,
                      const std::optional<WarmStart>& warm = std::nullopt) {
  PdmcfSolver solver(instance, config, warm ? &*warm : nullptr);
  return solver.Solve();
}

// Warm start from a perturbed problem: the weights are perturbed by a factor
// (1 +/- nu) and the perturbed problem is run only until its projected flow
// reaches the utility domain. Starting the original problem from the captured
// flow, dual and primal weight usually takes far fewer iterations than a cold
// start.
struct PerturbedWarmStart {
  WarmStart start;
  std::int64_t feasibility_iterations = 0;
};

inline PerturbedWarmStart WarmStartFromPerturbed(const ProblemInstance& instance,
                                                 double nu, std::uint64_t seed,
                                                 const SolverConfig& config) {
  ProblemInstance perturbed = instance;
  perturbed.utility = PerturbWeights(instance.utility, nu, seed);
  PdmcfSolver solver(perturbed, config);
  PerturbedWarmStart out;
  out.start = solver.RunUntilFeasible(&out.feasibility_iterations);
  return out;
}

}  // namespace pdmcf

#endif  // PDMCF_SOLVER_HPP_
