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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pdmcf/generator.hpp"
#include "pdmcf/solver.hpp"
#include "reference/reference.hpp"
#include "test_util.hpp"

namespace pdmcf {
namespace {

using testing::MaxAbsDiff;
using testing::TwoNodeInstance;

// One over-relaxed iteration written with dense products and the bisection
// projection; log utility only.
SolverState DenseIteration(const SolverState& s, const ProblemInstance& inst,
                           double rho) {
  const Matrix a = reference::DenseIncidence(inst.topology);
  const std::size_t n = inst.n();
  Matrix q = reference::Multiply(s.dual, a);
  for (std::size_t k = 0; k < q.size(); ++k) {
    q.values()[k] = s.flows_half.values()[k] + s.alpha * q.values()[k];
  }
  const Matrix f_hat = reference::ProjectFlowsOracle(q, inst.topology);
  Matrix f_next = f_hat;
  for (std::size_t k = 0; k < f_next.size(); ++k) {
    f_next.values()[k] = 2.0 * f_hat.values()[k] - s.flows_half.values()[k];
  }
  const Matrix t = reference::DenseTraffic(f_next, a);
  Matrix y_hat(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double y = s.dual(i, j) + s.beta * t(i, j);
      const double bw = s.beta * inst.utility.weights(i, j);
      y_hat(i, j) = 0.5 * (y - std::sqrt(y * y + 4.0 * bw));
    }
  }
  SolverState out = s;
  for (std::size_t k = 0; k < out.flows_half.size(); ++k) {
    out.flows_half.values()[k] =
        rho * f_hat.values()[k] + (1 - rho) * s.flows_half.values()[k];
  }
  for (std::size_t k = 0; k < out.dual.size(); ++k) {
    out.dual.values()[k] =
        rho * y_hat.values()[k] + (1 - rho) * s.dual.values()[k];
  }
  ++out.iter;
  return out;
}

TEST(SolverConfigTest, DefaultsAndValidation) {
  const SolverConfig c;
  EXPECT_EQ(c.rho, 1.9);
  EXPECT_EQ(c.theta, 0.5);
  EXPECT_EQ(c.k_adapt, 100);
  EXPECT_EQ(c.tau, 1e-5);
  EXPECT_EQ(c.k_check, 25);
  EXPECT_DOUBLE_EQ(c.ResolvedEpsilon(100), 0.01 / 9900.0);
  EXPECT_NO_THROW(c.Validate());

  SolverConfig bad;
  bad.rho = 2.0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = {};
  bad.epsilon = 0.0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = {};
  bad.theta = 1.5;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = {};
  bad.k_check = 0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = {};
  bad.omega0 = -1.0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
}

TEST(InitialStateTest, ColdStart) {
  const auto inst = GenerateInstance(10, 3, 0);
  const SolverState s = InitialState(inst, SolverConfig{});
  EXPECT_EQ(SquaredFrobeniusNorm(s.flows_half), 0.0);
  for (std::size_t i = 0; i < inst.n(); ++i) {
    for (std::size_t j = 0; j < inst.n(); ++j) {
      EXPECT_EQ(s.dual(i, j), i == j ? 0.0 : -1.0);
    }
  }
  EXPECT_DOUBLE_EQ(s.eta, StepSizeEta(inst.topology));
  EXPECT_DOUBLE_EQ(s.alpha * s.beta, s.eta * s.eta);
  EXPECT_EQ(s.iter, 0);
}

TEST(PdhgIterationTest, MatchesDenseTransliteration) {
  const auto inst = GenerateInstance(9, 3, 5);
  SolverState s = InitialState(inst, SolverConfig{});
  SolverState d = s;
  for (int k = 0; k < 30; ++k) {
    s = PdhgIteration(s, inst, 1.9);
    d = DenseIteration(d, inst, 1.9);
    ASSERT_LT(MaxAbsDiff(s.flows_half, d.flows_half), 1e-9) << "k=" << k;
    ASSERT_LT(MaxAbsDiff(s.dual, d.dual), 1e-9) << "k=" << k;
  }
  EXPECT_EQ(s.iter, 30);
}

TEST(PdhgIterationTest, FirstTwoNodeStepIsBitwiseTransliteration) {
  const auto inst = TwoNodeInstance();
  const SolverState s = InitialState(inst, SolverConfig{});
  const SolverState got = PdhgIteration(s, inst, 1.9);
  const SolverState want = DenseIteration(s, inst, 1.9);
  EXPECT_TRUE(got.flows_half == want.flows_half);
  EXPECT_TRUE(got.dual == want.dual);
}

TEST(PdhgIterationTest, UnitRelaxationKeepsProjection) {
  const auto inst = GenerateInstance(8, 2, 1);
  const SolverState s = InitialState(inst, SolverConfig{});
  const PrimalStep step = ComputePrimalStep(s, inst);
  const SolverState next = PdhgIteration(s, inst, 1.0);
  EXPECT_EQ(MaxAbsDiff(next.flows_half, step.projected), 0.0);
  EXPECT_DOUBLE_EQ(next.delta_flows,
                   FrobeniusDistance(step.projected, s.flows_half));
}

TEST(PdhgIterationTest, TwoNodeSaddleIsFixed) {
  const auto inst = TwoNodeInstance();
  WarmStart warm;
  warm.flows = Matrix(2, 2);
  warm.flows(0, 1) = 1.0;
  warm.flows(1, 0) = 1.0;
  warm.dual = Matrix(2, 2, -1.0);
  warm.dual(0, 0) = warm.dual(1, 1) = 0.0;
  SolverState s = InitialState(inst, SolverConfig{}, &warm);
  const SolverState next = PdhgIteration(s, inst, 1.9);
  EXPECT_LT(MaxAbsDiff(next.flows_half, warm.flows), 1e-15);
  EXPECT_LT(MaxAbsDiff(next.dual, warm.dual), 1e-12);
}

TEST(PdhgIterationTest, ReferenceOptimumIsNearlyFixed) {
  const auto inst = GenerateInstance(6, 2, 3);
  const auto ref = reference::ReferenceSolve(inst);
  ASSERT_TRUE(ref.converged);
  const Matrix t = FlowsToTraffic(ref.flows, inst.topology);
  WarmStart warm;
  warm.flows = ref.flows;
  warm.dual = UtilityDerivative(t, inst.utility);
  for (double& v : warm.dual.values()) v = -v;
  const SolverState s = InitialState(inst, SolverConfig{}, &warm);
  const SolverState next = PdhgIteration(s, inst, 1.9);
  EXPECT_LT(next.delta_flows, 1e-6);
  EXPECT_LT(next.delta_dual, 1e-6);
}

TEST(AdaptStepSizesTest, GeometricMeanUpdate) {
  const auto inst = GenerateInstance(6, 2, 0);
  SolverConfig config;
  SolverState s = InitialState(inst, config);
  EXPECT_TRUE(AdaptStepSizes(s, 1.0, 4.0, config));
  EXPECT_DOUBLE_EQ(s.omega, 2.0);
  EXPECT_TRUE(AdaptStepSizes(s, 1.0, 4.0, config));
  EXPECT_DOUBLE_EQ(s.omega, std::sqrt(8.0));
  EXPECT_DOUBLE_EQ(s.alpha, s.eta / s.omega);
  EXPECT_DOUBLE_EQ(s.beta, s.eta * s.omega);
  const double before = s.omega;
  EXPECT_FALSE(AdaptStepSizes(s, 1e-6, 4.0, config));
  EXPECT_FALSE(AdaptStepSizes(s, 4.0, 1e-6, config));
  EXPECT_EQ(s.omega, before);
}

TEST(PdmcfSolverTest, AdaptsAtFirstIterationAndKeepsInvariants) {
  const auto inst = GenerateInstance(12, 3, 2);
  PdmcfSolver solver(inst, SolverConfig{});
  solver.Advance(ComputePrimalStep(solver.state(), inst));
  const auto& s0 = solver.state();
  EXPECT_DOUBLE_EQ(s0.omega, std::sqrt(s0.delta_dual / s0.delta_flows));
  double omega = s0.omega;
  for (int k = 1; k < 250; ++k) {
    solver.Advance(ComputePrimalStep(solver.state(), inst));
    const auto& s = solver.state();
    if (k % 100 != 0) {
      EXPECT_EQ(s.omega, omega) << "k=" << k;
    }
    omega = s.omega;
    EXPECT_NEAR(s.alpha * s.beta, s.eta * s.eta, 1e-15);
    for (std::size_t i = 0; i < inst.n(); ++i) EXPECT_EQ(s.dual(i, i), 0.0);
  }
}

TEST(PdmcfSolverTest, SolvesTwoNodeInstance) {
  const Solution sol = Solve(TwoNodeInstance(), SolverConfig{});
  ASSERT_TRUE(sol.converged);
  EXPECT_NEAR(sol.utility, 0.0, 1e-3);
  EXPECT_NEAR(sol.flows(0, 1) + sol.flows(1, 1), 1.0, 1e-3);
  EXPECT_NEAR(sol.flows(0, 0) + sol.flows(1, 0), 1.0, 1e-3);
  EXPECT_LT(sol.final_residual, sol.threshold);
  EXPECT_DOUBLE_EQ(sol.threshold, 2 * 2 * DefaultEpsilon(2));
}

TEST(PdmcfSolverTest, ConvergedSolutionIsFeasible) {
  const auto inst = GenerateInstance(15, 3, 1);
  const Solution sol = Solve(inst, SolverConfig{});
  ASSERT_TRUE(sol.converged);
  EXPECT_EQ(sol.iterations % 25, 0);
  EXPECT_EQ(InfeasibleFraction(sol.traffic), 0.0);
  for (std::size_t l = 0; l < inst.m(); ++l) {
    double s = 0.0;
    for (std::size_t i = 0; i < inst.n(); ++i) {
      EXPECT_GE(sol.flows(i, l), 0.0);
      s += sol.flows(i, l);
    }
    EXPECT_LE(s, inst.topology.capacity(l) * (1 + 1e-12));
  }
  EXPECT_DOUBLE_EQ(sol.utility, *TotalUtility(sol.traffic, inst.utility));
  for (const auto& rec : sol.trace) EXPECT_EQ(rec.iter % 25, 0);
  EXPECT_EQ(sol.trace.back().iter, sol.iterations);

}

TEST(PdmcfSolverTest, WarmStartFromFinalIterateStopsImmediately) {
  const auto inst = GenerateInstance(12, 3, 4);
  PdmcfSolver solver(inst, SolverConfig{});
  const Solution sol = solver.Solve();
  ASSERT_TRUE(sol.converged);
  const WarmStart warm{solver.state().flows_half, solver.state().dual,
                       solver.state().omega};
  const Solution again = Solve(inst, SolverConfig{}, warm);
  EXPECT_TRUE(again.converged);
  EXPECT_EQ(again.iterations, 0);
  EXPECT_EQ(MaxAbsDiff(again.flows, sol.flows), 0.0);
}

TEST(PdmcfSolverTest, Deterministic) {
  const auto inst = GenerateInstance(14, 3, 6);
  const Solution a = Solve(inst, SolverConfig{});
  const Solution b = Solve(inst, SolverConfig{});
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_TRUE(a.flows == b.flows);
  EXPECT_TRUE(a.dual == b.dual);
  EXPECT_EQ(a.final_residual, b.final_residual);
}

TEST(PdmcfSolverTest, IterationCapReportsNotConverged) {
  const auto inst = GenerateInstance(20, 4, 0);
  SolverConfig config;
  config.max_iters = 10;
  const Solution sol = Solve(inst, config);
  EXPECT_FALSE(sol.converged);
  EXPECT_LE(sol.iterations, 10);
  EXPECT_EQ(sol.trace.back().iter, 10);
  EXPECT_EQ(sol.trace.front().iter, 0);
}

TEST(PdmcfSolverTest, NonFiniteIterateThrows) {
  const auto inst = GenerateInstance(6, 2, 0);
  WarmStart warm;
  warm.flows = Matrix(inst.n(), inst.m());
  warm.dual = Matrix(inst.n(), inst.n(), -1.0);
  warm.dual(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Solve(inst, SolverConfig{}, warm), NumericalError);
}

TEST(PdmcfSolverTest, FrozenOrDisabledAdaptationKeepsOmega) {
  const auto inst = GenerateInstance(12, 3, 3);
  SolverConfig config;
  config.max_iters = 300;
  config.omega0 = 1.7;
  config.adapt = false;
  for (const auto& rec : Solve(inst, config).trace) EXPECT_EQ(rec.omega, 1.7);

  config.adapt = true;
  config.freeze_adaptation_after = 150;
  PdmcfSolver solver(inst, config);
  for (int k = 0; k < 300; ++k) {
    solver.Advance(ComputePrimalStep(solver.state(), inst));
    if (k == 100) {
      EXPECT_NE(solver.state().omega, 1.7);
    }
  }
  const double frozen = solver.state().omega;
  PdmcfSolver longer(inst, config);
  for (int k = 0; k < 1000; ++k) {
    longer.Advance(ComputePrimalStep(longer.state(), inst));
  }
  EXPECT_EQ(longer.state().omega, frozen);
}

TEST(PdmcfSolverTest, RejectsInvalidInputs) {
  const auto inst = GenerateInstance(6, 2, 0);
  SolverConfig config;
  config.rho = 0.0;
  EXPECT_THROW(PdmcfSolver(inst, config), std::invalid_argument);
  WarmStart warm{Matrix(2, 2), Matrix(inst.n(), inst.n()), 1.0};
  EXPECT_THROW(PdmcfSolver(inst, SolverConfig{}, &warm),
               std::invalid_argument);
}

TEST(RunUntilFeasibleTest, ReturnsFirstFeasibleProjection) {
  const auto inst = GenerateInstance(20, 4, 1);
  PdmcfSolver solver(inst, SolverConfig{});
  std::int64_t iters = -1;
  const WarmStart w = solver.RunUntilFeasible(&iters);
  EXPECT_GT(iters, 0);
  EXPECT_EQ(InfeasibleFraction(FlowsToTraffic(w.flows, inst.topology)), 0.0);

  // The previous iterate was still infeasible.
  PdmcfSolver replay(inst, SolverConfig{});
  for (std::int64_t k = 0; k + 1 < iters; ++k) {
    replay.Advance(ComputePrimalStep(replay.state(), inst));
  }
  const auto prev = ComputePrimalStep(replay.state(), inst);
  EXPECT_GT(InfeasibleFraction(FlowsToTraffic(prev.projected, inst.topology)),
            0.0);
}

TEST(WarmStartFromPerturbedTest, ZeroPerturbationReproducesOriginalRun) {
  const auto inst = GenerateInstance(16, 3, 2);
  const auto perturbed = WarmStartFromPerturbed(inst, 0.0, 9, SolverConfig{});
  PdmcfSolver solver(inst, SolverConfig{});
  std::int64_t iters = 0;
  const WarmStart direct = solver.RunUntilFeasible(&iters);
  EXPECT_EQ(perturbed.feasibility_iterations, iters);
  EXPECT_TRUE(perturbed.start.flows == direct.flows);
  EXPECT_TRUE(perturbed.start.dual == direct.dual);
  EXPECT_EQ(perturbed.start.omega, direct.omega);
}

TEST(WarmStartFromPerturbedTest, WarmStartSolves) {
  const auto inst = GenerateInstance(16, 3, 2);
  const auto warm = WarmStartFromPerturbed(inst, 0.1, 3, SolverConfig{});
  const Solution sol = Solve(inst, SolverConfig{}, warm.start);
  EXPECT_TRUE(sol.converged);
}

}  // namespace
}  // namespace pdmcf
