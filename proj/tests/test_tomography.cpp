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
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "qsup/tomography.hpp"
#include "test_util.hpp"

using namespace qsup;
using qsup::testing::Rng;

namespace {

BasisFrequencies exact_frequencies(const DensityMatrix& rho) {
  BasisFrequencies n{};
  for (std::size_t j = 0; j < 6; ++j) {
    const Ket k = projection_basis(kAllBases[j]).ket;
    n[j] = (k.amplitudes().adjoint() * rho.matrix() * k.amplitudes())(0, 0).real();
  }
  return n;
}

std::vector<CountRecord> acquisition(const std::vector<std::uint64_t>& counts, int k, int rep,
                                     std::uint64_t monitor = 100) {
  std::vector<CountRecord> out;
  for (std::size_t j = 0; j < 6; ++j) out.push_back({k, rep, kAllBases[j], counts[j], monitor});
  return out;
}

}  // namespace

TEST_CASE("projection bases") {
  CMatrix sum = CMatrix::Zero(2, 2);
  for (std::size_t pair = 0; pair < 3; ++pair) {
    const Ket a = projection_basis(kAllBases[2 * pair]).ket;
    const Ket b = projection_basis(kAllBases[2 * pair + 1]).ket;
    CHECK(std::abs(inner(a, b)) < 1e-15);
    const CMatrix s = projector(a).matrix() + projector(b).matrix();
    CHECK(max_abs_entry(s - CMatrix::Identity(2, 2)) < 1e-15);
    sum += s;
  }
  CHECK(max_abs_entry(sum - 3.0 * CMatrix::Identity(2, 2)) < 1e-15);
  const Ket l = projection_basis(Basis::L).ket;
  CHECK(std::abs(l[1] - Complex(0.0, 1.0 / std::sqrt(2.0))) < 1e-15);
  for (Basis b : kAllBases) CHECK(parse_basis(std::string(1, basis_label(b))) == b);
  CHECK_THROWS_AS(parse_basis("X"), std::invalid_argument);
}

TEST_CASE("simulate_counts") {
  SUBCASE("horizontal state never fires V") {
    const auto recs = simulate_counts(DensityMatrix::from_ket(Ket{1.0, 0.0}), 1e4, 5, 9);
    CHECK(recs.size() == 30);
    for (const auto& r : recs) {
      if (r.basis == Basis::V) CHECK(r.counts == 0);
      CHECK(r.monitor >= 1);
    }
  }
  SUBCASE("maximally mixed state at high rate") {
    for (const auto& r : simulate_counts(DensityMatrix::maximally_mixed(2), 1e6, 2, 4))
      CHECK(std::abs(static_cast<double>(r.counts) - 5e5) < 5e3);
  }
  SUBCASE("trace below one lowers the rate") {
    double total = 0.0;
    for (const auto& r : simulate_counts(DensityMatrix::maximally_mixed(2).scaled(0.5), 1e6, 2, 4))
      total += static_cast<double>(r.counts);
    CHECK(total / 12.0 == doctest::Approx(2.5e5).epsilon(0.01));
  }
  SUBCASE("deterministic streams") {
    const auto rho = DensityMatrix::from_ket(Ket{0.6, 0.8});
    CHECK(simulate_counts(rho, 5e4, 4, 77, 2) == simulate_counts(rho, 5e4, 4, 77, 2));
    CHECK(simulate_counts(rho, 5e4, 4, 77, 2) != simulate_counts(rho, 5e4, 4, 78, 2));
    // Each window has its own stream, so more repetitions only append.
    const auto three = simulate_counts(rho, 5e4, 3, 77, 2);
    const auto five = simulate_counts(rho, 5e4, 5, 77, 2);
    CHECK(std::equal(three.begin(), three.end(), five.begin()));
  }
  CHECK_THROWS_AS(simulate_counts(DensityMatrix::maximally_mixed(2), 0.0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate_counts(DensityMatrix::maximally_mixed(2), 10.0, 0, 1), std::invalid_argument);
}

TEST_CASE("mle on exact data") {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const Ket psi = qsup::testing::random_ket(rng, 2);
    const auto r = mle_reconstruct(exact_frequencies(DensityMatrix::from_ket(psi)));
    CHECK(r.converged);
    CHECK(fidelity(r.rho_hat, psi) >= 1.0 - 1e-8);
  }
  const auto mixed = mle_reconstruct(exact_frequencies(DensityMatrix::maximally_mixed(2)));
  CHECK(purity(mixed.rho_hat) == doctest::Approx(0.5).epsilon(1e-9));
  for (int t = 0; t < 20; ++t) {
    const auto rho = qsup::testing::random_density(rng, 2);
    CHECK(trace_distance(mle_reconstruct(exact_frequencies(rho)).rho_hat, rho) < 1e-7);
  }
}

TEST_CASE("mle with noise") {
  SUBCASE("mixed state at high rate") {
    const auto recs = simulate_counts(DensityMatrix::maximally_mixed(2), 1e6, 1, 3);
    CHECK(purity(mle_reconstruct(recs).rho_hat) == doctest::Approx(0.5).epsilon(0.004));
  }
  SUBCASE("only one analyser setting fires") {
    const auto r = mle_reconstruct(BasisFrequencies{1000, 0, 500, 500, 500, 500});
    CHECK(r.converged);
    CHECK(fidelity(r.rho_hat, Ket{1.0, 0.0}) >= 1.0 - 1e-6);
    CHECK(r.rho_hat.is_normalized());
  }
  SUBCASE("likelihood never decreases") {
    const auto r = mle_reconstruct(BasisFrequencies{700, 300, 640, 360, 450, 550});
    for (std::size_t i = 1; i < r.log_likelihood_trace.size(); ++i)
      CHECK(r.log_likelihood_trace[i] >= r.log_likelihood_trace[i - 1] - 1e-9);
    CHECK(r.log_likelihood == doctest::Approx(log_likelihood(r.rho_hat.matrix(), {700, 300, 640, 360, 450, 550})));
  }
  CHECK_THROWS_AS(mle_reconstruct(BasisFrequencies{}), std::invalid_argument);
  CHECK_THROWS_AS(mle_reconstruct(BasisFrequencies{1, -1, 1, 1, 1, 1}), std::invalid_argument);
}

TEST_CASE("mle rejects malformed acquisitions") {
  auto recs = acquisition({10, 10, 10, 10, 10, 10}, 0, 1);
  recs.pop_back();
  CHECK_THROWS_AS(mle_reconstruct(std::span<const CountRecord>(recs)), std::invalid_argument);
  auto mixed = acquisition({10, 10, 10, 10, 10, 10}, 0, 1);
  mixed[3].repetition = 2;
  CHECK_THROWS_AS(mle_reconstruct(std::span<const CountRecord>(mixed)), std::invalid_argument);
  auto twice = acquisition({10, 10, 10, 10, 10, 10}, 0, 1);
  twice[1].basis = Basis::H;
  CHECK_THROWS_AS(mle_reconstruct(std::span<const CountRecord>(twice)), std::invalid_argument);
}

TEST_CASE("mle error shrinks as one over root N") {
  Rng rng(31);
  std::vector<Ket> states;
  for (int i = 0; i < 40; ++i) states.push_back(qsup::testing::random_ket(rng, 2));
  std::vector<double> scaled;
  std::uint64_t seed = 1;
  for (double shots : {1e3, 1e4, 1e5, 1e6, 1e7}) {
    double err = 0.0;
    for (const auto& psi : states) {
      const auto rho = DensityMatrix(0.9 * DensityMatrix::from_ket(psi).matrix() + 0.05 * CMatrix::Identity(2, 2));
      err += trace_distance(mle_reconstruct(simulate_counts(rho, shots, 1, seed++)).rho_hat, rho);
    }
    scaled.push_back(err / static_cast<double>(states.size()) * std::sqrt(shots));
  }
  for (std::size_t i = 1; i < scaled.size(); ++i) {
    CHECK(scaled[i] / scaled[i - 1] < 3.0);
    CHECK(scaled[i] / scaled[i - 1] > 1.0 / 3.0);
  }
}

TEST_CASE("mle fidelity is unbiased for an interior state") {
  const double c = 0.33;
  const auto rho = DensityMatrix::from_ket(Ket{std::sqrt(0.5), std::sqrt(0.5)});
  CMatrix m = rho.matrix();
  m(0, 1) *= c;
  m(1, 0) *= c;
  const DensityMatrix target(m);
  const Ket d{std::sqrt(0.5), std::sqrt(0.5)};
  const double truth = fidelity(target, d);
  std::vector<double> f;
  for (int rep = 1; rep <= 200; ++rep) {
    f.push_back(fidelity(mle_reconstruct(simulate_counts(target, 1e5, 1, 500 + rep)).rho_hat, d));
  }
  double mean = 0.0, var = 0.0;
  for (double x : f) mean += x / f.size();
  for (double x : f) var += (x - mean) * (x - mean) / (f.size() - 1);
  CHECK(std::abs(mean - truth) <= 3.0 * std::sqrt(var / f.size()));
}

TEST_CASE("loss_rate and summarize on a hand fixture") {
  // Three repetitions with diagonal reconstructions F = 0.9, 0.8, 0.7 against |H>.
  std::vector<CountRecord> recs;
  std::vector<TomographyResult> results;
  for (int rep = 1; rep <= 3; ++rep) {
    const double f = 1.0 - 0.1 * rep;
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = f;
    m(1, 1) = 1.0 - f;
    results.push_back(TomographyResult{DensityMatrix(m), 0.0, 1, true, {}});
    const auto a = acquisition({90, 10, 50, 50, 50, 50}, 0, rep, 100);
    recs.insert(recs.end(), a.begin(), a.end());
  }
  const double l0 = loss_rate(recs);
  CHECK(l0 == doctest::Approx(3.0));
  const auto s = summarize(results, Ket{1.0, 0.0}, recs, l0);
  CHECK(s.F_mean == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(s.F_stderr == doctest::Approx(std::sqrt(0.02 / 6.0)).epsilon(1e-12));
  const double p1 = 0.81 + 0.01, p2 = 0.64 + 0.04, p3 = 0.49 + 0.09;
  const double pm = (p1 + p2 + p3) / 3.0;
  CHECK(s.P_mean == doctest::Approx(pm).epsilon(1e-12));
  const double pv = ((p1 - pm) * (p1 - pm) + (p2 - pm) * (p2 - pm) + (p3 - pm) * (p3 - pm)) / 6.0;
  CHECK(s.P_stderr == doctest::Approx(std::sqrt(pv)).epsilon(1e-12));
  CHECK(s.p_sur_hat == 1.0);

  SUBCASE("identical repetitions have zero spread") {
    std::vector<TomographyResult> same(3, results[0]);
    CHECK(summarize(same, Ket{1.0, 0.0}, recs, l0).F_stderr == 0.0);
  }
  SUBCASE("halved counts halve the survival estimate") {
    std::vector<CountRecord> half;
    for (int rep = 1; rep <= 3; ++rep) {
      const auto a = acquisition({45, 5, 25, 25, 25, 25}, 1, rep, 100);
      half.insert(half.end(), a.begin(), a.end());
    }
    CHECK(summarize(results, Ket{1.0, 0.0}, half, l0).p_sur_hat == doctest::Approx(0.5));
  }
  CHECK_THROWS_AS(summarize(std::span(results).first(1), Ket{1.0, 0.0}, recs, l0), std::invalid_argument);
}

TEST_CASE("survival estimate converges with shots") {
  CMatrix m = DensityMatrix::from_ket(Ket{0.6, 0.8}).matrix();
  const DensityMatrix ref(m);
  const DensityMatrix lossy(0.8 * m);
  const auto r0 = simulate_counts(ref, 1e8, 5, 1, 0);
  const auto r1 = simulate_counts(lossy, 1e8, 5, 1, 1);
  std::vector<TomographyResult> res;
  for (const auto& acq : group_by_acquisition(r1)) res.push_back(mle_reconstruct(acq));
  const auto s = summarize(res, Ket{0.6, 0.8}, r1, loss_rate(r0));
  CHECK(std::abs(s.p_sur_hat - 0.8) < 1e-3);
}

TEST_CASE("counts csv round trip") {
  Rng rng(6);
  std::vector<CountRecord> recs;
  for (int i = 0; i < 200; ++i) {
    recs.push_back({static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 30), kAllBases[rng() % 6],
                    rng() % 1000000000ULL, 1 + rng() % 1000ULL});
  }
  std::stringstream ss;
  write_counts_csv(ss, recs);
  CHECK(read_counts_csv(ss) == recs);

  std::stringstream crlf("k,repetition,basis,counts,monitor\r\n0,1,H,5,7\r\n");
  const auto parsed = read_counts_csv(crlf);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].monitor == 7);

  std::stringstream bad_header("k,rep,basis,counts,monitor\n");
  CHECK_THROWS_AS(read_counts_csv(bad_header), std::invalid_argument);
  std::stringstream bad_basis("k,repetition,basis,counts,monitor\n0,1,Q,5,7\n");
  CHECK_THROWS_AS(read_counts_csv(bad_basis), std::invalid_argument);
  std::stringstream bad_fields("k,repetition,basis,counts,monitor\n0,1,H,5\n");
  CHECK_THROWS_AS(read_counts_csv(bad_fields), std::invalid_argument);
  std::stringstream negative("k,repetition,basis,counts,monitor\n0,1,H,-5,7\n");
  CHECK_THROWS_AS(read_counts_csv(negative), std::invalid_argument);
}
