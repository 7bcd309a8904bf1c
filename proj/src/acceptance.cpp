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

#include "qsup/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "qsup/channel.hpp"
#include "qsup/environment.hpp"
#include "qsup/harness.hpp"
#include "qsup/tomography.hpp"

namespace qsup {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Ket random_qubit(Rng& rng) {
  std::normal_distribution<double> g;
  return Ket{Complex(g(rng), g(rng)), Complex(g(rng), g(rng))}.normalized();
}

// Root of a monotone function on [lo, hi] by bisection.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  const bool rising = f(hi) > f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > 0.0) == rising) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

const FigureRow* find_row(const FigureTable& t, Mode mode, double psi, std::optional<double> xi, int k) {
  for (const auto& r : t) {
    if (r.mode == mode && r.psi_deg == psi && r.xi_deg == xi && r.k == k) return &r;
  }
  return nullptr;
}

CriterionResult calibration_endpoints(const AcceptanceOptions& o) {
  CriterionResult r{1, "calibration and k=4 endpoints", true, {}};
  auto per_block = [](double x) { return std::exp(-x * x / 8.0); };
  // Largest d/σ keeping the protected worst case at ((1+c)/2)^4 >= 0.73.
  const double d_hi = bisect([&](double x) { return std::pow((1.0 + per_block(x)) / 2.0, 4) - 0.73; }, 0.1, 3.0);
  // Smallest d/σ bringing the unprotected 45° fidelity down to 0.56 at k = 4.
  const double d_lo = bisect([&](double x) { return (1.0 + per_block(4.0 * x)) / 2.0 - 0.56; }, 0.1, 3.0);
  const bool in_window = d_lo <= kCalibratedDOverSigma && kCalibratedDOverSigma <= d_hi;

  SweepSpec spec;
  spec.shots_mean = 1e5;
  spec.n_repetitions = 30;
  spec.seed = o.seed;
  spec.workers = o.workers;
  const auto start = std::chrono::steady_clock::now();
  const FigureTable table = run_sweep(spec);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const FigureRow* bare = find_row(table, Mode::Unprotected, 45.0, std::nullopt, 4);
  double worst_f = 1.0;
  double worst_p = 1.0;
  for (const auto& row : table) {
    if (row.mode != Mode::Protected) continue;
    worst_f = std::min(worst_f, row.F_mean);
    worst_p = std::min(worst_p, row.P_mean);
  }
  r.passed = in_window && bare && bare->F_mean <= 0.56 && bare->P_mean <= 0.56 && worst_f >= 0.99 &&
             worst_p >= 0.99 && seconds < 60.0;
  r.detail = fmt::format(
      "window [{:.4f}, {:.4f}] contains {}; unprotected psi=45 k=4 F={:.4f} P={:.4f} (<=0.56); "
      "protected min F={:.5f} min P={:.5f} (>=0.99); {} cells in {:.1f}s (<60s)",
      d_lo, d_hi, kCalibratedDOverSigma, bare ? bare->F_mean : -1.0, bare ? bare->P_mean : -1.0, worst_f, worst_p,
      table.size(), seconds);
  return r;
}

CriterionResult worst_case_xi(const AcceptanceOptions&) {
  CriterionResult r{2, "worst-case protected state is xi=45", true, {}};
  std::vector<std::string> notes;
  for (int k = 1; k <= 4; ++k) {
    int argmin = -1;
    double best = 2.0;
    for (int deg = 0; deg <= 90; ++deg) {
      ChannelConfig cfg;
      cfg.xi = degrees_to_radians(deg);
      cfg.d_per_block = kCalibratedDOverSigma;
      cfg.n_blocks = k;
      cfg.protect = true;
      const double p = survival_product(cfg).value;
      if (p < best) {
        best = p;
        argmin = deg;
      }
    }
    r.passed = r.passed && argmin == 45;
    notes.push_back(fmt::format("k={}: argmin {} (p={:.6f})", k, argmin, best));
  }
  r.detail = fmt::format("{}", fmt::join(notes, "; "));
  return r;
}

CriterionResult zeno_limit(const AcceptanceOptions&) {
  CriterionResult r{3, "Zeno limit at fixed total displacement", true, {}};
  const double total = 4.0 * kCalibratedDOverSigma;
  double previous = -1.0;
  bool increasing = true;
  double last = 0.0;
  for (int n = 1; n <= 256; n *= 2) {
    ChannelConfig cfg;
    cfg.xi = degrees_to_radians(45.0);
    cfg.d_per_block = total / n;
    cfg.n_blocks = n;
    cfg.protect = true;
    last = survival_product(cfg).value;
    increasing = increasing && last > previous;
    previous = last;
  }
  const bool limit_ok = std::abs(1.0 - last) <= 1e-3;
  r.passed = increasing && limit_ok;
  r.detail = fmt::format("strictly increasing: {}; p_sur(256) = {:.6f} (need >= 0.999)", increasing ? "yes" : "no", last);
  return r;
}

CriterionResult dual_path_survival(const AcceptanceOptions& o) {
  CriterionResult r{4, "product formula equals joint-state norm", true, {}};
  Rng rng(o.seed + 4);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    ChannelConfig cfg;
    cfg.psi = uniform(rng, 0.0, std::numbers::pi);
    cfg.xi = uniform(rng, 0.0, std::numbers::pi);
    cfg.phi = uniform(rng, 0.0, std::numbers::pi);
    cfg.d_per_block = uniform(rng, 0.0, 3.0);
    cfg.n_blocks = static_cast<int>(rng() % 7);
    cfg.protect = true;
    const double product = survival_product(cfg).value;

    const Ket xi = basis_ket(cfg.xi);
    auto state = prepare(xi, cfg.phi, cfg.sigma);
    for (int b = 0; b < cfg.n_blocks; ++b) state = zeno_project(decoherence_block(state, cfg.d_per_block), xi);
    worst = std::max(worst, std::abs(product - state.norm_squared()));
  }
  r.passed = worst <= 1e-10;
  r.detail = fmt::format("max |delta| = {:.3e} over 1000 configurations (<= 1e-10)", worst);
  return r;
}

CriterionResult kraus_dilation(const AcceptanceOptions& o) {
  CriterionResult r{5, "dephasing Kraus map equals traced dilation", true, {}};
  Rng rng(o.seed + 5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Ket input = random_qubit(rng);
    const double phi = uniform(rng, 0.0, std::numbers::pi);
    const double d = uniform(rng, 0.0, 2.0);
    for (int k = 0; k <= 6; ++k) {
      auto state = prepare(input, phi, 1.0);
      for (int b = 0; b < k; ++b) state = decoherence_block(state, d);
      const Dilation dil = dilate(state);
      const DensityMatrix traced = partial_trace(DensityMatrix::from_ket(dil.joint), 2, dil.env_dim, Keep::left);
      const DensityMatrix mapped =
          apply_kraus(dephasing_kraus(OverlapKernel(1.0)(0.0, k * d), phi), DensityMatrix::from_ket(input));
      worst = std::max(worst, max_abs_entry(traced.matrix() - mapped.matrix()));
    }
  }
  r.passed = worst <= 1e-10;
  r.detail = fmt::format("max entrywise difference {:.3e} over 100 inputs x k=0..6 (<= 1e-10)", worst);
  return r;
}

CriterionResult state_independence(const AcceptanceOptions& o) {
  CriterionResult r{6, "protected output independent of input and coupling", true, {}};
  Rng rng(o.seed + 6);
  double min_f = 1.0;
  double min_p = 1.0;
  for (int trial = 0; trial < 500; ++trial) {
    ChannelConfig cfg;
    cfg.psi = uniform(rng, 0.0, std::numbers::pi);
    cfg.xi = uniform(rng, 0.0, std::numbers::pi);
    cfg.phi = uniform(rng, 0.0, std::numbers::pi);
    cfg.d_per_block = uniform(rng, 0.0, 2.0);
    cfg.n_blocks = 1 + static_cast<int>(rng() % 6);
    cfg.protect = true;
    const DensityMatrix rho = run_channel(cfg).rho_out.normalized();
    min_f = std::min(min_f, fidelity(rho, basis_ket(cfg.psi)));
    min_p = std::min(min_p, purity(rho));
  }
  r.passed = min_f >= 1.0 - 1e-9 && min_p >= 1.0 - 1e-9;
  r.detail = fmt::format("min F = 1 - {:.2e}, min P = 1 - {:.2e} over 500 runs (>= 1 - 1e-9)", 1.0 - min_f, 1.0 - min_p);
  return r;
}

CriterionResult overlap_oracle(const AcceptanceOptions& o) {
  CriterionResult r{7, "analytic overlaps match grid quadrature", true, {}};
  Rng rng(o.seed + 7);
  double worst = 0.0;
  auto random_superposition = [&](double sigma) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<GaussianComponent> comps;
    for (int i = 0; i < n; ++i) {
      comps.push_back({uniform(rng, -3.0, 3.0) * sigma, Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0))});
    }
    return GaussianSuperposition(sigma, std::move(comps));
  };
  for (int trial = 0; trial < 200; ++trial) {
    const double sigma = uniform(rng, 0.5, 2.0);
    const auto a = random_superposition(sigma);
    const auto b = random_superposition(sigma);
    worst = std::max(worst, std::abs(overlap(a, b) - grid_oracle_overlap(a, b, default_grid(a, b))));
  }
  r.passed = worst <= 1e-6;
  r.detail = fmt::format("max |analytic - grid| = {:.3e} over 200 pairs (<= 1e-6)", worst);
  return r;
}

CriterionResult tomography_consistency(const AcceptanceOptions& o) {
  CriterionResult r{8, "maximum-likelihood tomography self-consistency", true, {}};
  Rng rng(o.seed + 8);
  double worst_exact = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Ket psi = random_qubit(rng);
    const DensityMatrix rho = DensityMatrix::from_ket(psi);
    BasisFrequencies n{};
    for (Basis b : kAllBases) n[static_cast<std::size_t>(b)] = fidelity(rho, projection_basis(b).ket);
    worst_exact = std::min(worst_exact, fidelity(mle_reconstruct(n).rho_hat, psi));
  }
  int good = 0;
  double worst_td = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const DensityMatrix rho = DensityMatrix::from_ket(random_qubit(rng));
    const auto records = simulate_counts(rho, 1e5, 1, o.seed * 1000 + static_cast<std::uint64_t>(trial));
    const double td = trace_distance(mle_reconstruct(records).rho_hat, rho);
    worst_td = std::max(worst_td, td);
    if (td <= 0.02) ++good;
  }
  r.passed = worst_exact >= 1.0 - 1e-8 && good >= 190;
  r.detail = fmt::format("exact data min F = 1 - {:.2e} (>= 1 - 1e-8); 1e5 shots: {}/200 within trace distance 0.02 "
                         "(need >= 190), worst {:.4f}",
                         1.0 - worst_exact, good, worst_td);
  return r;
}

CriterionResult statistics_formulas(const AcceptanceOptions& o) {
  CriterionResult r{9, "fidelity/purity statistics and loss normalization", true, {}};
  // Three diagonal reconstructions against |H>: F_i = 0.9, 0.8, 0.7 and
  // P_i = 0.82, 0.68, 0.58.
  std::vector<TomographyResult> results;
  for (double a : {0.9, 0.8, 0.7}) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = 1.0 - a;
    results.push_back(TomographyResult{DensityMatrix(m), 0.0, 0, true, {}});
  }
  const auto records = simulate_counts(DensityMatrix::maximally_mixed(2), 1e4, 3, o.seed);
  const RunSummary s = summarize(results, Ket{1.0, 0.0}, records, loss_rate(records));
  const double f_err = std::sqrt((0.01 + 0.0 + 0.01) / 6.0);
  const double p_mean = (0.82 + 0.68 + 0.58) / 3.0;
  const double p_err = std::sqrt((std::pow(0.82 - p_mean, 2) + std::pow(0.68 - p_mean, 2) + std::pow(0.58 - p_mean, 2)) / 6.0);
  const double dev = std::max({std::abs(s.F_mean - 0.8), std::abs(s.F_stderr - f_err), std::abs(s.P_mean - p_mean),
                               std::abs(s.P_stderr - p_err)});
  r.passed = dev <= 1e-12 && s.p_sur_hat == 1.0;
  r.detail = fmt::format("max deviation from hand values {:.2e} (<= 1e-12); self-normalized p_sur_hat = {}", dev, s.p_sur_hat);
  return r;
}

CriterionResult determinism(const AcceptanceOptions& o) {
  CriterionResult r{10, "deterministic sweep output", true, {}};
  SweepSpec spec;
  spec.shots_mean = 2e4;
  spec.seed = o.seed;
  spec.workers = 1;
  const std::string first = to_csv(run_sweep(spec));
  const std::string second = to_csv(run_sweep(spec));
  spec.workers = std::max(o.workers, 4);
  const std::string parallel = to_csv(run_sweep(spec));
  r.passed = first == second && first == parallel;
  r.detail = fmt::format("repeat identical: {}; 1 vs {} workers identical: {} ({} bytes)", first == second ? "yes" : "no",
                         spec.workers, first == parallel ? "yes" : "no", first.size());
  return r;
}

using Criterion = CriterionResult (*)(const AcceptanceOptions&);

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> table = {calibration_endpoints, worst_case_xi,       zeno_limit,
                                               dual_path_survival,    kraus_dilation,      state_independence,
                                               overlap_oracle,        tomography_consistency, statistics_formulas,
                                               determinism};
  return table;
}

}  // namespace

std::vector<int> acceptance_ids() {
  std::vector<int> ids(criteria().size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i + 1);
  return ids;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  if (id < 1 || id > static_cast<int>(criteria().size())) {
    throw std::invalid_argument(fmt::format("no acceptance criterion #{}", id));
  }
  try {
    return criteria()[static_cast<std::size_t>(id - 1)](options);
  } catch (const std::exception& e) {
    return CriterionResult{id, "criterion raised", false, e.what()};
  }
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> out;
  for (int id : acceptance_ids()) out.push_back(run_criterion(id, options));
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("[{}] #{:<2} {}: {}", r.passed ? "PASS" : "FAIL", r.id, r.title, r.detail);
}

}  // namespace qsup
