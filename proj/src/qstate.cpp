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

#include "qsup/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace qsup {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

bool is_hermitian(const CMatrix& m, double tolerance) {
  return max_abs_entry(m - m.adjoint()) <= tolerance;
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument(fmt::format("{}: expected a non-empty square matrix, got {}x{}",
                                            what, m.rows(), m.cols()));
  }
}

// Clamp a figure of merit into [lo, hi], refusing roundoff larger than kClamp.
double clamp_metric(double value, double lo, double hi, const char* what) {
  if (value < lo - tol::kClamp || value > hi + tol::kClamp) {
    throw std::domain_error(fmt::format("{} = {} outside [{}, {}]", what, value, lo, hi));
  }
  return std::clamp(value, lo, hi);
}

}  // namespace

double max_abs_entry(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
  // Symmetrize so tiny anti-Hermitian roundoff does not leak into the solver.
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// ---- Ket ------------------------------------------------------------------

Ket::Ket(CVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw std::invalid_argument("Ket: dimension must be >= 1");
  if (!amps_.allFinite()) throw std::domain_error("Ket: non-finite amplitude");
}

Ket::Ket(std::initializer_list<Complex> amplitudes)
    : Ket(CVector(Eigen::Map<const CVector>(amplitudes.begin(), idx(amplitudes.size())))) {}

bool Ket::is_normalized() const { return std::abs(norm_squared() - 1.0) <= tol::kNormalized; }

Ket Ket::normalized() const {
  const double n = amps_.norm();
  if (n == 0.0) throw std::domain_error("Ket: cannot normalize the zero vector");
  return Ket(amps_ / n);
}

Ket Ket::scaled(Complex factor) const { return Ket(amps_ * factor); }

Complex inner(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(fmt::format("inner: dimension mismatch {} vs {}", a.dim(), b.dim()));
  }
  return a.amplitudes().dot(b.amplitudes());  // Eigen's dot conjugates the left operand
}

// ---- Operator -------------------------------------------------------------

Operator::Operator(CMatrix entries, OperatorKind kind) : m_(std::move(entries)), kind_(kind) {
  require_square(m_, "Operator");
  if (!m_.allFinite()) throw std::domain_error("Operator: non-finite entry");
  const auto n = m_.rows();
  switch (kind_) {
    case OperatorKind::unitary:
      if (max_abs_entry(m_.adjoint() * m_ - CMatrix::Identity(n, n)) > tol::kStructural) {
        throw std::invalid_argument("Operator: matrix tagged unitary is not unitary");
      }
      break;
    case OperatorKind::projector:
      if (!is_hermitian(m_, tol::kStructural) || max_abs_entry(m_ * m_ - m_) > tol::kStructural) {
        throw std::invalid_argument("Operator: matrix tagged projector is not an orthogonal projector");
      }
      break;
    case OperatorKind::kraus:
    case OperatorKind::generic:
      break;
  }
}

Operator Operator::adjoint() const { return Operator(m_.adjoint(), kind_); }

Ket Operator::apply(const Ket& ket) const {
  if (ket.dim() != dim()) {
    throw std::invalid_argument(fmt::format("Operator::apply: dimension mismatch {} vs {}", dim(), ket.dim()));
  }
  return Ket(CVector(m_ * ket.amplitudes()));
}

Operator identity(std::size_t dim) {
  return Operator(CMatrix::Identity(idx(dim), idx(dim)), OperatorKind::unitary);
}

Operator projector(const Ket& ket) {
  const Ket k = ket.normalized();
  return Operator(k.amplitudes() * k.amplitudes().adjoint(), OperatorKind::projector);
}

Operator product(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("product: dimension mismatch");
  const bool unitary = a.kind() == OperatorKind::unitary && b.kind() == OperatorKind::unitary;
  return Operator(a.matrix() * b.matrix(), unitary ? OperatorKind::unitary : OperatorKind::generic);
}

// ---- DensityMatrix --------------------------------------------------------

DensityMatrix::DensityMatrix(CMatrix entries) : m_(std::move(entries)) {
  require_square(m_, "DensityMatrix");
  if (!m_.allFinite()) throw std::domain_error("DensityMatrix: non-finite entry");
  if (!is_hermitian(m_, tol::kStructural)) throw std::invalid_argument("DensityMatrix: not Hermitian");
  const double tr = trace();
  if (!(tr > 0.0) || tr > 1.0 + tol::kStructural) {
    throw std::invalid_argument(fmt::format("DensityMatrix: trace {} outside (0, 1]", tr));
  }
  const double lambda_min = hermitian_eigenvalues(m_)(0);
  if (lambda_min < -tol::kStructural) {
    throw std::invalid_argument(fmt::format("DensityMatrix: not PSD (smallest eigenvalue {})", lambda_min));
  }
}

DensityMatrix DensityMatrix::from_ket(const Ket& ket) {
  return DensityMatrix(ket.amplitudes() * ket.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix(CMatrix::Identity(idx(dim), idx(dim)) / static_cast<double>(dim));
}

bool DensityMatrix::is_normalized() const { return std::abs(trace() - 1.0) <= tol::kTraceNormalized; }

DensityMatrix DensityMatrix::normalized() const { return DensityMatrix(m_ / trace()); }

DensityMatrix DensityMatrix::scaled(double factor) const { return DensityMatrix(m_ * factor); }

// ---- KrausMap -------------------------------------------------------------

KrausMap::KrausMap(std::vector<Operator> operators, bool trace_preserving)
    : ops_(std::move(operators)), trace_preserving_(trace_preserving) {
  if (ops_.empty()) throw std::invalid_argument("KrausMap: no operators");
  for (const auto& op : ops_) {
    if (op.dim() != ops_.front().dim()) throw std::invalid_argument("KrausMap: operators differ in dimension");
  }
  if (trace_preserving_) {
    const double residual = completeness_residual();
    if (residual > tol::kCompleteness) {
      throw std::invalid_argument(fmt::format("KrausMap: completeness residual {} exceeds {}", residual,
                                              tol::kCompleteness));
    }
  } else {
    const auto n = idx(dim());
    CMatrix sum = CMatrix::Zero(n, n);
    for (const auto& op : ops_) sum += op.matrix().adjoint() * op.matrix();
    const double lambda_min = hermitian_eigenvalues(CMatrix::Identity(n, n) - sum)(0);
    if (lambda_min < -tol::kCompleteness) {
      throw std::invalid_argument("KrausMap: Σ K†K exceeds the identity");
    }
  }
}

double KrausMap::completeness_residual() const {
  const auto n = idx(dim());
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& op : ops_) sum += op.matrix().adjoint() * op.matrix();
  return max_abs_entry(sum - CMatrix::Identity(n, n));
}

// ---- free functions -------------------------------------------------------

Ket basis_ket(double angle, BasisSide which) {
  if (!std::isfinite(angle)) throw std::domain_error("basis_ket: non-finite angle");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return which == BasisSide::plus ? Ket{c, s} : Ket{-s, c};
}

Ket tensor(const Ket& a, const Ket& b) {
  CVector out(idx(a.dim() * b.dim()));
  for (std::size_t i = 0; i < a.dim(); ++i) {
    out.segment(idx(i * b.dim()), idx(b.dim())) = a[i] * b.amplitudes();
  }
  return Ket(std::move(out));
}

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

Operator tensor(const Operator& a, const Operator& b) {
  OperatorKind kind = OperatorKind::generic;
  if (a.kind() == b.kind() && (a.kind() == OperatorKind::unitary || a.kind() == OperatorKind::projector)) {
    kind = a.kind();
  }
  return Operator(kron(a.matrix(), b.matrix()), kind);
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t dim_left, std::size_t dim_right, Keep keep) {
  if (dim_left == 0 || dim_right == 0 || rho.dim() != dim_left * dim_right) {
    throw std::invalid_argument(fmt::format("partial_trace: dim {} is not {} x {}", rho.dim(), dim_left, dim_right));
  }
  const CMatrix& m = rho.matrix();
  const auto dl = idx(dim_left);
  const auto dr = idx(dim_right);
  CMatrix out;
  if (keep == Keep::left) {
    out = CMatrix::Zero(dl, dl);
    for (Eigen::Index i = 0; i < dl; ++i)
      for (Eigen::Index j = 0; j < dl; ++j)
        for (Eigen::Index a = 0; a < dr; ++a) out(i, j) += m(i * dr + a, j * dr + a);
  } else {
    out = CMatrix::Zero(dr, dr);
    for (Eigen::Index a = 0; a < dr; ++a)
      for (Eigen::Index b = 0; b < dr; ++b)
        for (Eigen::Index i = 0; i < dl; ++i) out(a, b) += m(i * dr + a, i * dr + b);
  }
  return DensityMatrix(std::move(out));
}

double fidelity(const DensityMatrix& rho, const Ket& target) {
  if (!rho.is_normalized()) throw std::invalid_argument("fidelity: density matrix is not normalized");
  if (!target.is_normalized()) throw std::invalid_argument("fidelity: target ket is not normalized");
  if (rho.dim() != target.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const Complex f = target.amplitudes().dot(rho.matrix() * target.amplitudes());
  return clamp_metric(f.real(), 0.0, 1.0, "fidelity");
}

double purity(const DensityMatrix& rho) {
  if (!rho.is_normalized()) throw std::invalid_argument("purity: density matrix is not normalized");
  // Tr(ρ²) = Σ|ρ_ij|² for Hermitian ρ.
  const double p = rho.matrix().squaredNorm();
  return clamp_metric(p, 1.0 / static_cast<double>(rho.dim()), 1.0, "purity");
}

DensityMatrix apply_kraus(const KrausMap& map, const DensityMatrix& rho) {
  if (map.dim() != rho.dim()) {
    throw std::invalid_argument(fmt::format("apply_kraus: map dim {} vs state dim {}", map.dim(), rho.dim()));
  }
  const auto n = idx(rho.dim());
  CMatrix out = CMatrix::Zero(n, n);
  for (const auto& k : map.operators()) out += k.matrix() * rho.matrix() * k.matrix().adjoint();
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

DensityMatrix evolve(const Operator& unitary, const DensityMatrix& rho) {
  if (unitary.kind() != OperatorKind::unitary) throw std::invalid_argument("evolve: operator is not unitary");
  return apply_kraus(KrausMap({unitary}, true), rho);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  return 0.5 * hermitian_eigenvalues(a.matrix() - b.matrix()).cwiseAbs().sum();
}

}  // namespace qsup
