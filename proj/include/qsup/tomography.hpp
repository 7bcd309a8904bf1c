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

#ifndef QSUP_TOMOGRAPHY_HPP
#define QSUP_TOMOGRAPHY_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "qsup/qstate.hpp"

namespace qsup {

enum class Basis { H, V, D, A, L, R };

inline constexpr std::array<Basis, 6> kAllBases = {Basis::H, Basis::V, Basis::D,
                                                   Basis::A, Basis::L, Basis::R};

char basis_label(Basis b);
Basis parse_basis(std::string_view label);

struct ProjectionBasis {
  Basis label;
  Ket ket;
};

// H=(1,0), V=(0,1), D=(H+V)/√2, A=(H−V)/√2, L=(H+iV)/√2, R=(H−iV)/√2.
ProjectionBasis projection_basis(Basis b);

// One 1-second acquisition window for one analyser setting.
struct CountRecord {
  int k = 0;
  int repetition = 1;  // 1..N_T
  Basis basis = Basis::H;
  std::uint64_t counts = 0;
  std::uint64_t monitor = 1;

  bool operator==(const CountRecord&) const = default;
};

// Counter-based stream seed for one (k, repetition, basis) window, so serial
// and parallel executions draw identical counts.
std::uint64_t stream_seed(std::uint64_t seed, int k, int repetition, Basis basis);

// C ~ Poisson(shots_mean·Tr(Π_ζ ρ)), M ~ Poisson(shots_mean·monitor_fraction)
// (clamped to at least 1). The trace of rho carries transmission × survival.
std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, double shots_mean, int n_repetitions,
                                         std::uint64_t seed, int k = 0, double monitor_fraction = 1.0);

struct MleOptions {
  double tolerance = 1e-10;
  int max_iterations = 10000;
};

struct TomographyResult {
  DensityMatrix rho_hat;
  double log_likelihood;
  int iterations;
  bool converged;
  std::vector<double> log_likelihood_trace;  // one entry per accepted iterate
};

// Frequencies indexed like kAllBases. Any non-negative scale.
using BasisFrequencies = std::array<double, 6>;

// Σ n_ζ log(Tr(Π_ζ ρ)/3): the multinomial log-likelihood of the six settings.
double log_likelihood(const CMatrix& rho, const BasisFrequencies& n);

TomographyResult mle_reconstruct(const BasisFrequencies& n, const MleOptions& options = {});
// Records of a single (k, repetition), one per basis.
TomographyResult mle_reconstruct(std::span<const CountRecord> records, const MleOptions& options = {});

struct RunSummary {
  int k = 0;
  double F_mean = 0.0;
  double F_stderr = 0.0;
  double P_mean = 0.0;
  double P_stderr = 0.0;
  double p_sur_hat = 0.0;
};

// L_k = Σ_ζ C̄_ζ / M̄_ζ with bars denoting repetition averages.
double loss_rate(std::span<const CountRecord> records);

RunSummary summarize(std::span<const TomographyResult> results, const Ket& target,
                     std::span<const CountRecord> records, double reference_loss);

// Records grouped per (k, repetition), ordered by k then repetition.
std::vector<std::vector<CountRecord>> group_by_acquisition(std::span<const CountRecord> records);

// CSV with header `k,repetition,basis,counts,monitor`.
void write_counts_csv(std::ostream& out, std::span<const CountRecord> records);
std::vector<CountRecord> read_counts_csv(std::istream& in);

}  // namespace qsup

#endif  // QSUP_TOMOGRAPHY_HPP
