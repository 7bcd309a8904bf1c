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

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "qsup/qstate.hpp"
#include "test_util.hpp"

using namespace qsup;
using qsup::testing::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

// Dephased joint state built by hand: δ|0>|e0> + η|1>|e1> with
// <e0|e1> = c, embedded in a 2-dimensional environment.
DensityMatrix dephased_joint(double c) {
  const double s = 1.0 / std::sqrt(2.0);
  const Ket e0{1.0, 0.0};
  const Ket e1{c, std::sqrt(1.0 - c * c)};
  const CVector joint = s * tensor(Ket{1.0, 0.0}, e0).amplitudes() + s * tensor(Ket{0.0, 1.0}, e1).amplitudes();
  return DensityMatrix::from_ket(Ket(joint));
}

}  // namespace

TEST_CASE("basis_ket") {
  const Ket h = basis_ket(0.0);
  CHECK(h[0] == Complex(1.0));
  CHECK(h[1] == Complex(0.0));

  const Ket d = basis_ket(kPi / 4);
  CHECK(std::abs(d[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(d[1] - 1.0 / std::sqrt(2.0)) < 1e-15);

  const Ket p = basis_ket(kPi / 9, BasisSide::perp);
  CHECK(std::abs(p[0] + std::sin(20.0 * kPi / 180.0)) < 1e-15);
  CHECK(std::abs(p[1] - std::cos(20.0 * kPi / 180.0)) < 1e-15);

  for (double a : {-3.0, 0.3, 1.1, 7.5}) {
    CHECK(basis_ket(a).is_normalized());
    CHECK(std::abs(inner(basis_ket(a), basis_ket(a, BasisSide::perp))) <= 1e-12);
  }
  CHECK_THROWS_AS(basis_ket(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(basis_ket(INFINITY), std::domain_error);
}

TEST_CASE("tensor uses the left factor as the slow index") {
  const Ket zz = tensor(Ket{1.0, 0.0}, Ket{1.0, 0.0});
  REQUIRE(zz.dim() == 4);
  CHECK(zz.amplitudes().isApprox(CVector::Unit(4, 0)));

  const Operator pi_h_id = tensor(projector(Ket{1.0, 0.0}), identity(2));
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = expected(1, 1) = 1.0;
  CHECK(max_abs_entry(pi_h_id.matrix() - expected) == 0.0);

  const DensityMatrix rho = tensor(DensityMatrix::from_ket(basis_ket(kPi / 4)), DensityMatrix::from_ket(Ket{1.0, 0.0}));
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const bool corner = (i == 0 || i == 2) && (j == 0 || j == 2);
      CHECK(std::abs(rho.matrix()(i, j) - (corner ? 0.5 : 0.0)) < 1e-15);
    }
  }
}

TEST_CASE("partial_trace") {
  Rng rng(11);
  SUBCASE("product states factorize") {
    for (int t = 0; t < 20; ++t) {
      const auto a = qsup::testing::random_density(rng, 2);
      const auto b = qsup::testing::random_density(rng, 3);
      const auto ab = tensor(a, b);
      CHECK(max_abs_entry(partial_trace(ab, 2, 3, Keep::left).matrix() - a.matrix()) < 1e-12);
      CHECK(max_abs_entry(partial_trace(ab, 2, 3, Keep::right).matrix() - b.matrix()) < 1e-12);
    }
  }
  SUBCASE("Bell state reduces to the maximally mixed state") {
    const double s = 1.0 / std::sqrt(2.0);
    const auto bell = DensityMatrix::from_ket(Ket{s, 0.0, 0.0, s});
    CHECK(max_abs_entry(partial_trace(bell, 2, 2, Keep::left).matrix() - CMatrix::Identity(2, 2) / 2.0) < 1e-15);
  }
  SUBCASE("dephased joint state has off-diagonals c/2") {
    for (double c : {0.0, 0.3, 0.77, 1.0}) {
      const auto reduced = partial_trace(dephased_joint(c), 2, 2, Keep::left);
      CHECK(std::abs(reduced(0, 1) - c / 2.0) < 1e-15);
      CHECK(std::abs(reduced(1, 0) - c / 2.0) < 1e-15);
      CHECK(std::abs(reduced.trace() - 1.0) < 1e-12);
    }
  }
  CHECK_THROWS_AS(partial_trace(DensityMatrix::maximally_mixed(4), 2, 3, Keep::left), std::invalid_argument);
}

TEST_CASE("fidelity") {
  const Ket psi = basis_ket(0.4);
  CHECK(fidelity(DensityMatrix::from_ket(psi), psi) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(DensityMatrix::maximally_mixed(2), Ket{0.6, Complex(0.0, 0.8)}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  for (double c : {0.0, 0.25, 0.9}) {
    const auto reduced = partial_trace(dephased_joint(c), 2, 2, Keep::left);
    CHECK(std::abs(fidelity(reduced, basis_ket(kPi / 4)) - (1.0 + c) / 2.0) < 1e-12);
  }
  CHECK_THROWS_AS(fidelity(DensityMatrix::from_ket(psi).scaled(0.5), psi), std::invalid_argument);
  CHECK_THROWS_AS(fidelity(DensityMatrix::from_ket(psi), psi.scaled(2.0)), std::invalid_argument);
}

TEST_CASE("purity") {
  CHECK(purity(DensityMatrix::from_ket(basis_ket(1.2))) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(purity(DensityMatrix::maximally_mixed(2)) == doctest::Approx(0.5).epsilon(1e-12));
  for (double c : {0.0, 0.5, 0.99}) {
    const auto reduced = partial_trace(dephased_joint(c), 2, 2, Keep::left);
    CHECK(std::abs(purity(reduced) - (1.0 + c * c) / 2.0) < 1e-12);
  }
  CHECK_THROWS_AS(purity(DensityMatrix::maximally_mixed(2).scaled(0.9)), std::invalid_argument);
}

TEST_CASE("apply_kraus") {
  const auto d_state = DensityMatrix::from_ket(basis_ket(kPi / 4));
  SUBCASE("identity map") {
    const KrausMap id({identity(2)}, true);
    CHECK(max_abs_entry(apply_kraus(id, d_state).matrix() - d_state.matrix()) < 1e-15);
  }
  SUBCASE("dephasing scales coherences by c") {
    const double c = 0.37;
    CMatrix z = CMatrix::Identity(2, 2);
    z(1, 1) = -1.0;
    const KrausMap deph({Operator(std::sqrt((1 + c) / 2) * CMatrix::Identity(2, 2), OperatorKind::kraus),
                         Operator(std::sqrt((1 - c) / 2) * z, OperatorKind::kraus)},
                        true);
    const auto out = apply_kraus(deph, d_state);
    CHECK(std::abs(out(0, 1) - c * 0.5) < 1e-15);
    CHECK(std::abs(out(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(out(1, 1) - 0.5) < 1e-15);
  }
  SUBCASE("Zeno Kraus operator on its eigenstate") {
    const double p = 0.81;
    const Ket psi = basis_ket(0.7);
    const KrausMap k({Operator(std::sqrt(p) * projector(psi).matrix(), OperatorKind::kraus)}, false);
    const auto rho = DensityMatrix::from_ket(psi);
    CHECK(max_abs_entry(apply_kraus(k, rho).matrix() - p * rho.matrix()) < 1e-15);
  }
  CHECK_THROWS_AS(apply_kraus(KrausMap({identity(2)}, true), DensityMatrix::maximally_mixed(4)),
                  std::invalid_argument);
}

TEST_CASE("type invariants are enforced at construction") {
  CHECK_THROWS_AS(Ket(CVector(0)), std::invalid_argument);
  CMatrix not_hermitian(2, 2);
  not_hermitian << 0.5, 0.1, 0.0, 0.5;
  CHECK_THROWS_AS(DensityMatrix{not_hermitian}, std::invalid_argument);
  CMatrix negative(2, 2);
  negative << 1.2, 0.0, 0.0, -0.2;
  CHECK_THROWS_AS(DensityMatrix{negative}, std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix{CMatrix::Identity(2, 2)}, std::invalid_argument);  // trace 2
  CHECK_THROWS_AS(DensityMatrix{CMatrix::Zero(2, 2)}, std::invalid_argument);
  CHECK_THROWS_AS(Operator(2.0 * CMatrix::Identity(2, 2), OperatorKind::unitary), std::invalid_argument);
  CHECK_THROWS_AS(Operator(0.5 * CMatrix::Identity(2, 2), OperatorKind::projector), std::invalid_argument);
  CHECK_THROWS_AS(KrausMap({Operator(1.1 * CMatrix::Identity(2, 2))}, false), std::invalid_argument);
  CHECK_THROWS_AS(KrausMap({Operator(0.9 * CMatrix::Identity(2, 2))}, true), std::invalid_argument);
  CHECK_NOTHROW(KrausMap({Operator(0.9 * CMatrix::Identity(2, 2))}, false));
}

TEST_CASE("properties over random states") {
  Rng rng(2026);
  for (int t = 0; t < 100; ++t) {
    const std::size_t dim = 2 + static_cast<std::size_t>(t % 3);
    const auto rho = qsup::testing::random_density(rng, dim);
    const Operator u(qsup::testing::random_unitary(rng, dim), OperatorKind::unitary);
    CHECK(std::abs(purity(evolve(u, rho)) - purity(rho)) <= 1e-10);

    // Trace-preserving maps from random isometries V: C^d -> C^(2d).
    const CMatrix v = qsup::testing::random_isometry(rng, 2 * dim, dim);
    const auto n = static_cast<Eigen::Index>(dim);
    const KrausMap map({Operator(v.topRows(n), OperatorKind::kraus), Operator(v.bottomRows(n), OperatorKind::kraus)},
                       true);
    CHECK(std::abs(apply_kraus(map, rho).trace() - rho.trace()) <= 1e-10);
    CHECK(hermitian_eigenvalues(apply_kraus(map, rho).matrix())(0) >= -1e-12);
  }
  for (int t = 0; t < 50; ++t) {
    const Ket psi = qsup::testing::random_ket(rng, 2);
    const auto pure = DensityMatrix::from_ket(psi);
    CHECK(fidelity(pure, psi) >= 1.0 - 1e-12);
    const auto perturbed = DensityMatrix(0.95 * pure.matrix() + 0.05 * qsup::testing::random_density(rng, 2).matrix());
    CHECK(fidelity(perturbed, psi) < 1.0 - 1e-8);
  }
}

TEST_CASE("trace distance") {
  const auto h = DensityMatrix::from_ket(Ket{1.0, 0.0});
  const auto v = DensityMatrix::from_ket(Ket{0.0, 1.0});
  CHECK(trace_distance(h, v) == doctest::Approx(1.0));
  CHECK(trace_distance(h, DensityMatrix::maximally_mixed(2)) == doctest::Approx(0.5));
  CHECK(trace_distance(h, h) == doctest::Approx(0.0));
}
