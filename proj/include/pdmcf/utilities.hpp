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

// Concave utility families u(s) = w log s and u(s) = w s^gamma, and the
// proximal operator of the convex conjugate of -u that drives the dual update.

#ifndef PDMCF_UTILITIES_HPP_
#define PDMCF_UTILITIES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "pdmcf/matrix.hpp"
#include "pdmcf/parallel.hpp"

namespace pdmcf {

enum class UtilityKind { kLog, kPower };

struct UtilityFamily {
  UtilityKind kind = UtilityKind::kLog;
  // Exponent of the power family; unused for kLog.
  double power_exponent = 0.5;

  static UtilityFamily Log() { return {UtilityKind::kLog, 0.5}; }
  static UtilityFamily Power(double exponent) {
    return {UtilityKind::kPower, exponent};
  }

  void Validate() const {
    if (kind == UtilityKind::kPower &&
        !(power_exponent > 0.0 && power_exponent < 1.0)) {
      throw std::invalid_argument("power exponent must lie in (0, 1)");
    }
  }

  friend bool operator==(const UtilityFamily&, const UtilityFamily&) = default;
};

// Per-pair utilities u_ij(s) = weights(i, j) * phi(s). Diagonal weights are
// stored but ignored (u_ii = 0).
struct UtilitySpec {
  UtilityFamily family;
  Matrix weights;

  void Validate() const {
    family.Validate();
    if (weights.rows() != weights.cols()) {
      throw std::invalid_argument("weight matrix must be square");
    }
    for (std::size_t i = 0; i < weights.rows(); ++i) {
      for (std::size_t j = 0; j < weights.cols(); ++j) {
        if (i == j) continue;
        const double w = weights(i, j);
        if (!(w > 0.0) || !std::isfinite(w)) {
          throw std::invalid_argument("weight (" + std::to_string(i) + ", " +
                                      std::to_string(j) +
                                      ") must be positive");
        }
      }
    }
  }
};

inline double UtilityValue(double s, double w, const UtilityFamily& f) {
  return f.kind == UtilityKind::kLog ? w * std::log(s)
                                     : w * std::pow(s, f.power_exponent);
}

inline double UtilitySlope(double s, double w, const UtilityFamily& f) {
  if (f.kind == UtilityKind::kLog) return w / s;
  return w * f.power_exponent * std::pow(s, f.power_exponent - 1.0);
}

// Total utility sum_{i != j} u_ij(T_ij). Returns nullopt when some
// off-diagonal entry is nonpositive, i.e. T is outside the utility domain.
inline std::optional<double> TotalUtility(const Matrix& traffic,
                                          const UtilitySpec& spec) {
  RequireShape(traffic, spec.weights.rows(), spec.weights.cols(),
               "TotalUtility");
  double total = 0.0;
  for (std::size_t i = 0; i < traffic.rows(); ++i) {
    for (std::size_t j = 0; j < traffic.cols(); ++j) {
      if (i == j) continue;
      const double t = traffic(i, j);
      if (!(t > 0.0)) return std::nullopt;
      total += UtilityValue(t, spec.weights(i, j), spec.family);
    }
  }
  return total;
}

// Entrywise u'_ij(T_ij) off the diagonal, zero on it.
inline Matrix UtilityDerivative(const Matrix& traffic,
                                const UtilitySpec& spec) {
  RequireShape(traffic, spec.weights.rows(), spec.weights.cols(),
               "UtilityDerivative");
  const std::size_t n = traffic.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double t = traffic(i, j);
      if (!(t > 0.0)) {
        throw std::domain_error("traffic entry (" + std::to_string(i) + ", " +
                                std::to_string(j) + ") is not positive");
      }
      out(i, j) = UtilitySlope(t, spec.weights(i, j), spec.family);
    }
  }
  return out;
}

// prox of beta * (-w log)^* at y: the negative root of z^2 - y z - beta w = 0.
// The two branches avoid cancellation for large |y|.
inline double ProxLogConjugate(double y, double beta, double w) {
  const double disc = std::sqrt(y * y + 4.0 * beta * w);
  if (y <= 0.0) return 0.5 * (y - disc);
  return -2.0 * beta * w / (y + disc);
}

// prox of beta * (-w s^gamma)^* at y. With s = -z the answer is the unique
// positive root of
//   g(s) = s^(c1+2) + y s^(c1+1) - c1 c2,
//   c1 = gamma / (1 - gamma),  c2 = beta (1/gamma - 1) (w gamma)^(1/(1-gamma)).
// g < 0 on [0, max(0, -y)] and is strictly increasing beyond it, so bracketed
// Newton with bisection fallback converges. Stops once
// |g| <= 1e-12 max(1, c1 c2) or the bracket can no longer shrink.
inline double ProxPowerConjugate(double y, double beta, double w,
                                 double gamma) {
  const double c1 = gamma / (1.0 - gamma);
  const double c2 =
      beta * (1.0 / gamma - 1.0) * std::pow(w * gamma, 1.0 / (1.0 - gamma));
  const double k = c1 * c2;
  const double tol = 1e-12 * std::max(1.0, k);
  const auto g = [&](double s) { return std::pow(s, c1 + 1.0) * (s + y) - k; };
  const auto dg = [&](double s) {
    return std::pow(s, c1) * ((c1 + 2.0) * s + (c1 + 1.0) * y);
  };

  double lo = std::max(0.0, -y);
  double hi = std::max(1.0, std::abs(y) + std::pow(k, 1.0 / (c1 + 2.0)));
  while (g(hi) < 0.0) hi *= 2.0;  // only reachable through round-off

  // Starting point: the root of s^(c1+1) (s + y) = k with one term dominant.
  double s = y >= 0.0 ? std::min(std::pow(k / y, 1.0 / (c1 + 1.0)),
                                std::pow(k, 1.0 / (c1 + 2.0)))
                     : lo + k / std::pow(std::max(lo, 1e-300), c1 + 1.0);
  if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);

  double best = s;
  double best_abs = std::abs(g(s));
  for (int it = 0; it < 200; ++it) {
    const double gs = g(s);
    if (std::abs(gs) < best_abs) {
      best = s;
      best_abs = std::abs(gs);
    }
    if (std::abs(gs) <= tol) break;
    if (gs < 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    if (!(std::nextafter(lo, hi) < hi)) break;
    const double d = dg(s);
    double next = d > 0.0 ? s - gs / d : lo;
    if (!(next > lo && next < hi)) next = lo + 0.5 * (hi - lo);
    s = next;
  }
  // The iterate with the smallest |g| may sit one ulp from a better double.
  for (double cand : {std::nextafter(best, 0.0),
                      std::nextafter(best, 2.0 * best + 1.0)}) {
    if (cand > 0.0 && std::abs(g(cand)) < best_abs) {
      best = cand;
      best_abs = std::abs(g(cand));
    }
  }
  return -best;
}

inline double ProxConjugate(double y, double beta, double w,
                            const UtilityFamily& family) {
  return family.kind == UtilityKind::kLog
             ? ProxLogConjugate(y, beta, w)
             : ProxPowerConjugate(y, beta, w, family.power_exponent);
}

// Entrywise prox off the diagonal. Diagonal entries are set to 0, the prox of
// the indicator of {0} that the conjugate of u_ii = 0 reduces to.
inline Matrix ProxConjugateMatrix(const Matrix& input, double beta,
                                  const UtilitySpec& spec) {
  RequireShape(input, spec.weights.rows(), spec.weights.cols(),
               "ProxConjugateMatrix");
  const std::size_t n = input.rows();
  Matrix out(n, n);
  ParallelFor(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        out(i, j) = ProxConjugate(input(i, j), beta, spec.weights(i, j),
                                  spec.family);
      }
    }
  });
  return out;
}

}  // namespace pdmcf

#endif  // PDMCF_UTILITIES_HPP_
