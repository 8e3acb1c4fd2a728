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

#ifndef PDMCF_MATRIX_HPP_
#define PDMCF_MATRIX_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdmcf {

// Dense row-major matrix of doubles. Rows of flow matrices are destinations,
// so the incidence kernels walk contiguous memory.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix Identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline void RequireShape(const Matrix& m, std::size_t rows, std::size_t cols,
                         const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument(
        std::string(what) + ": expected " + std::to_string(rows) + "x" +
        std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
        std::to_string(m.cols()));
  }
}

inline double SquaredFrobeniusNorm(const Matrix& m) {
  double sum = 0.0;
  for (double v : m.values()) sum += v * v;
  return sum;
}

// ||a - b||_F, summed in storage order.
inline double FrobeniusDistance(const Matrix& a, const Matrix& b) {
  RequireShape(b, a.rows(), a.cols(), "FrobeniusDistance");
  const auto av = a.values();
  const auto bv = b.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < av.size(); ++k) {
    const double d = av[k] - bv[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

// Cache-blocked transpose.
inline Matrix Transpose(const Matrix& m) {
  constexpr std::size_t kBlock = 32;
  Matrix t(m.cols(), m.rows());
  for (std::size_t ib = 0; ib < m.rows(); ib += kBlock) {
    const std::size_t ie = std::min(m.rows(), ib + kBlock);
    for (std::size_t jb = 0; jb < m.cols(); jb += kBlock) {
      const std::size_t je = std::min(m.cols(), jb + kBlock);
      for (std::size_t i = ib; i < ie; ++i) {
        for (std::size_t j = jb; j < je; ++j) t(j, i) = m(i, j);
      }
    }
  }
  return t;
}

inline bool AllFinite(const Matrix& m) {
  return std::all_of(m.values().begin(), m.values().end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace pdmcf

#endif  // PDMCF_MATRIX_HPP_
