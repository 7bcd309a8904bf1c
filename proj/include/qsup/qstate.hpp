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

#ifndef QSUP_QSTATE_HPP
#define QSUP_QSTATE_HPP

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace qsup {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

namespace tol {
inline constexpr double kNormalized = 1e-12;
inline constexpr double kStructural = 1e-10;
inline constexpr double kCompleteness = 1e-9;
inline constexpr double kTraceNormalized = 1e-9;
inline constexpr double kClamp = 1e-8;
}  // namespace tol

// A pure state vector. Unnormalized kets are allowed; their squared norm is
// treated as a physical weight (e.g. a post-selection probability).
class Ket {
 public:
  explicit Ket(CVector amplitudes);
  Ket(std::initializer_list<Complex> amplitudes);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  double norm_squared() const { return amps_.squaredNorm(); }
  bool is_normalized() const;
  Ket normalized() const;
  Ket scaled(Complex factor) const;

 private:
  CVector amps_;
};

// <a|b>
Complex inner(const Ket& a, const Ket& b);

enum class OperatorKind { unitary, projector, kraus, generic };

class Operator {
 public:
  explicit Operator(CMatrix entries, OperatorKind kind = OperatorKind::generic);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  OperatorKind kind() const { return kind_; }

  Operator adjoint() const;
  Ket apply(const Ket& ket) const;

 private:
  CMatrix m_;
  OperatorKind kind_;
};

Operator identity(std::size_t dim);
// |k><k| / <k|k>
Operator projector(const Ket& ket);
Operator product(const Operator& a, const Operator& b);

// Hermitian, PSD, 0 < trace <= 1. A trace below one carries the probability
// of the post-selection that produced the state.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix entries);
  static DensityMatrix from_ket(const Ket& ket);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  double trace() const { return m_.trace().real(); }
  bool is_normalized() const;
  DensityMatrix normalized() const;
  DensityMatrix scaled(double factor) const;

 private:
  CMatrix m_;
};

class KrausMap {
 public:
  KrausMap(std::vector<Operator> operators, bool trace_preserving);

  const std::vector<Operator>& operators() const { return ops_; }
  bool trace_preserving() const { return trace_preserving_; }
  std::size_t dim() const { return ops_.front().dim(); }
  // max |Σ K†K − 1| entrywise.
  double completeness_residual() const;

 private:
  std::vector<Operator> ops_;
  bool trace_preserving_;
};

enum class BasisSide { plus, perp };

// plus: cos θ|0> + sin θ|1>; perp: −sin θ|0> + cos θ|1>.
Ket basis_ket(double angle, BasisSide which = BasisSide::plus);

// Kronecker products. The left factor is the slow (most significant) index:
// |i>⊗|a> sits at position i·dim_b + a.
Ket tensor(const Ket& a, const Ket& b);
Operator tensor(const Operator& a, const Operator& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

enum class Keep { left, right };

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t dim_left, std::size_t dim_right,
                            Keep keep);

// <target|rho|target>; both arguments must be normalized.
double fidelity(const DensityMatrix& rho, const Ket& target);
// Tr(rho²) of a normalized state.
double purity(const DensityMatrix& rho);

DensityMatrix apply_kraus(const KrausMap& map, const DensityMatrix& rho);
// U rho U† for a unitary U.
DensityMatrix evolve(const Operator& unitary, const DensityMatrix& rho);

// ½ Σ|λ_i(a − b)|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Hermitian eigenvalues in ascending order.
Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m);
double max_abs_entry(const CMatrix& m);

}  // namespace qsup

#endif  // QSUP_QSTATE_HPP
