// Copyright 2026 The tokbudget Authors.
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

#ifndef TOKBUDGET_DCT_H_
#define TOKBUDGET_DCT_H_

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace tokbudget {

// Orthonormal DCT-II matrix: C(u, y) = a(u) cos(pi (2y + 1) u / 2n) with
// a(0) = sqrt(1/n), a(u > 0) = sqrt(2/n). C * C^T = I.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dct_matrix(int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> c(n, n);
  const double inv_n = 1.0 / n;
  for (int u = 0; u < n; ++u) {
    const double a = std::sqrt((u == 0 ? 1.0 : 2.0) * inv_n);
    for (int y = 0; y < n; ++y) {
      c(u, y) = static_cast<Scalar>(
          a * std::cos(std::numbers::pi * (2 * y + 1) * u * 0.5 * inv_n));
    }
  }
  return c;
}

// Separable 2-D transform pair for a fixed frame size.
template <typename Scalar>
class Dct2d {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Dct2d(int height, int width)
      : rows_(dct_matrix<Scalar>(height)), cols_(dct_matrix<Scalar>(width)) {}

  int height() const { return static_cast<int>(rows_.rows()); }
  int width() const { return static_cast<int>(cols_.rows()); }

  // Row basis C_H (height x height) and column basis C_W (width x width).
  const Matrix& row_basis() const { return rows_; }
  const Matrix& col_basis() const { return cols_; }

  template <typename Derived>
  auto forward(const Eigen::MatrixBase<Derived>& x) const {
    return (rows_ * x * cols_.transpose()).eval();
  }

  template <typename Derived>
  auto inverse(const Eigen::MatrixBase<Derived>& coeffs) const {
    return (rows_.transpose() * coeffs * cols_).eval();
  }

 private:
  Matrix rows_;
  Matrix cols_;
};

}  // namespace tokbudget

#endif  // TOKBUDGET_DCT_H_
