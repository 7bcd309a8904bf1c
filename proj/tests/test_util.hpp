// Copyright 2026 The QSUP Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QSUP_TESTS_TEST_UTIL_HPP
#define QSUP_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <random>

#include "qsup/qstate.hpp"

namespace qsup::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline CMatrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline Ket random_ket(Rng& rng, std::size_t dim) {
  return Ket(CVector(random_complex(rng, static_cast<Eigen::Index>(dim), 1).col(0))).normalized();
}

inline CMatrix random_unitary(Rng& rng, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::HouseholderQR<CMatrix> qr(random_complex(rng, n, n));
  return qr.householderQ() * CMatrix::Identity(n, n);
}

// Columns with orthonormal entries: V†V = 1 for V of shape (rows, cols).
inline CMatrix random_isometry(Rng& rng, std::size_t rows, std::size_t cols) {
  return random_unitary(rng, rows).leftCols(static_cast<Eigen::Index>(cols));
}

inline DensityMatrix random_density(Rng& rng, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  const CMatrix a = random_complex(rng, n, n);
  const CMatrix m = a * a.adjoint();
  return DensityMatrix(m / m.trace().real());
}

}  // namespace qsup::testing

#endif  // QSUP_TESTS_TEST_UTIL_HPP
