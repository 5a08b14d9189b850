// Copyright 2026 The pdpsim Authors
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

#ifndef PDPSIM__SMOOTHING_SPLINE_HPP_
#define PDPSIM__SMOOTHING_SPLINE_HPP_

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace pdpsim
{

/// Fitted values of the natural cubic smoothing spline minimizing
///   sum_i (y_i - f(t_i))^2 + lambda * integral f''(t)^2 dt
/// at the knots t (strictly increasing). Reinsch's formulation: solve
/// (R + lambda Q^T Q) gamma = Q^T y, then f = y - lambda Q gamma. The system
/// is symmetric positive definite and pentadiagonal, factored as banded LDL^T.
inline std::vector<double> smoothing_spline_fit(
  std::span<const double> t, std::span<const double> y, const double lambda)
{
  const std::size_t n = t.size();
  if (n != y.size()) {
    throw std::invalid_argument("smoothing_spline_fit: size mismatch");
  }
  if (n < 3 || lambda <= 0.0) {
    return {y.begin(), y.end()};
  }
  const std::size_t m = n - 2;
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = t[i + 1] - t[i];
    if (!(h[i] > 0.0)) {
      throw std::invalid_argument("smoothing_spline_fit: knots must increase");
    }
  }
  // Column j of Q (j = 0..m-1) has entries at rows j, j+1, j+2.
  std::vector<double> q0(m), q1(m), q2(m);
  for (std::size_t j = 0; j < m; ++j) {
    q0[j] = 1.0 / h[j];
    q1[j] = -1.0 / h[j] - 1.0 / h[j + 1];
    q2[j] = 1.0 / h[j + 1];
  }
  // Bands of A = R + lambda Q^T Q: diagonal d, first and second off-diagonals e, f.
  std::vector<double> d(m), e(m, 0.0), f(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    d[j] = (h[j] + h[j + 1]) / 3.0 + lambda * (q0[j] * q0[j] + q1[j] * q1[j] + q2[j] * q2[j]);
    if (j + 1 < m) {
      e[j] = h[j + 1] / 6.0 + lambda * (q1[j] * q0[j + 1] + q2[j] * q1[j + 1]);
    }
    if (j + 2 < m) {
      f[j] = lambda * q2[j] * q0[j + 2];
    }
  }
  std::vector<double> rhs(m);
  for (std::size_t j = 0; j < m; ++j) {
    rhs[j] = q0[j] * y[j] + q1[j] * y[j + 1] + q2[j] * y[j + 2];
  }

  // LDL^T with unit lower-triangular L of bandwidth 2.
  std::vector<double> D(m), L1(m, 0.0), L2(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double dj = d[j];
    if (j >= 1) {
      dj -= L1[j - 1] * L1[j - 1] * D[j - 1];
    }
    if (j >= 2) {
      dj -= L2[j - 2] * L2[j - 2] * D[j - 2];
    }
    D[j] = dj;
    if (j + 1 < m) {
      double v = e[j];
      if (j >= 1) {
        v -= L1[j - 1] * L2[j - 1] * D[j - 1];
      }
      L1[j] = v / dj;
    }
    if (j + 2 < m) {
      L2[j] = f[j] / dj;
    }
  }
  std::vector<double> gamma(rhs);
  for (std::size_t j = 0; j < m; ++j) {
    if (j >= 1) {
      gamma[j] -= L1[j - 1] * gamma[j - 1];
    }
    if (j >= 2) {
      gamma[j] -= L2[j - 2] * gamma[j - 2];
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    gamma[j] /= D[j];
  }
  for (std::size_t jj = m; jj-- > 0;) {
    if (jj + 1 < m) {
      gamma[jj] -= L1[jj] * gamma[jj + 1];
    }
    if (jj + 2 < m) {
      gamma[jj] -= L2[jj] * gamma[jj + 2];
    }
  }

  std::vector<double> out(y.begin(), y.end());
  for (std::size_t j = 0; j < m; ++j) {
    out[j] -= lambda * q0[j] * gamma[j];
    out[j + 1] -= lambda * q1[j] * gamma[j];
    out[j + 2] -= lambda * q2[j] * gamma[j];
  }
  return out;
}

}  // namespace pdpsim

#endif  // PDPSIM__SMOOTHING_SPLINE_HPP_
