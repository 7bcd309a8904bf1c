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

#include "qsup/tomography.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "qsup/csv.hpp"

namespace qsup {

namespace {

std::size_t basis_index(Basis b) { return static_cast<std::size_t>(b); }

const std::array<CMatrix, 6>& projectors() {
  static const std::array<CMatrix, 6> table = [] {
    std::array<CMatrix, 6> out;
    for (Basis b : kAllBases) out[basis_index(b)] = projector(projection_basis(b).ket).matrix();
    return out;
  }();
  return table;
}

std::array<double, 6> probabilities(const CMatrix& rho) {
  std::array<double, 6> p{};
  for (std::size_t j = 0; j < 6; ++j) p[j] = (projectors()[j] * rho).trace().real();
  return p;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t poisson(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long long> dist(mean);
  return static_cast<std::uint64_t>(dist(rng));
}

// Linear-inversion Bloch vector, pulled back into the unit ball.
CMatrix linear_inversion_start(const BasisFrequencies& n) {
  auto axis = [&](Basis plus, Basis minus) {
    const double a = n[basis_index(plus)];
    const double b = n[basis_index(minus)];
    return a + b > 0.0 ? (a - b) / (a + b) : 0.0;
  };
  double x = axis(Basis::D, Basis::A);
  double y = axis(Basis::L, Basis::R);
  double z = axis(Basis::H, Basis::V);
  const double r = std::sqrt(x * x + y * y + z * z);
  if (r > 1.0) {
    x /= r;
    y /= r;
    z /= r;
  }
  CMatrix rho(2, 2);
  rho << 0.5 * (1.0 + z), Complex(0.5 * x, -0.5 * y), Complex(0.5 * x, 0.5 * y), 0.5 * (1.0 - z);
  return rho;
}

CMatrix hermitian_normalized(const CMatrix& m) {
  const CMatrix h = 0.5 * (m + m.adjoint());
  return h / h.trace().real();
}

std::uint64_t parse_uint(const std::string& field, const char* what, std::size_t line) {
  std::uint64_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw std::invalid_argument(fmt::format("counts csv line {}: bad {} '{}'", line, what, field));
  }
  return value;
}

}  // namespace

char basis_label(Basis b) { return "HVDALR"[basis_index(b)]; }

Basis parse_basis(std::string_view label) {
  if (label.size() == 1) {
    for (Basis b : kAllBases) {
      if (basis_label(b) == label[0]) return b;
    }
  }
  throw std::invalid_argument(fmt::format("unknown projection basis '{}'", label));
}

ProjectionBasis projection_basis(Basis b) {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};
  switch (b) {
    case Basis::H: return {b, Ket{1.0, 0.0}};
    case Basis::V: return {b, Ket{0.0, 1.0}};
    case Basis::D: return {b, Ket{s, s}};
    case Basis::A: return {b, Ket{s, -s}};
    case Basis::L: return {b, Ket{s, i * s}};
    case Basis::R: return {b, Ket{s, -i * s}};
  }
  throw std::logic_error("projection_basis: unreachable");
}

std::uint64_t stream_seed(std::uint64_t seed, int k, int repetition, Basis basis) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(k)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(repetition)));
  return splitmix64(h ^ static_cast<std::uint64_t>(basis_index(basis)));
}

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho, double shots_mean, int n_repetitions,
                                         std::uint64_t seed, int k, double monitor_fraction) {
  if (rho.dim() != 2) throw std::invalid_argument("simulate_counts: expected a qubit density matrix");
  if (!(shots_mean > 0.0) || !std::isfinite(shots_mean)) {
    throw std::invalid_argument(fmt::format("simulate_counts: shots_mean must be > 0, got {}", shots_mean));
  }
  if (n_repetitions < 1) throw std::invalid_argument("simulate_counts: n_repetitions must be >= 1");
  if (!(monitor_fraction > 0.0)) throw std::invalid_argument("simulate_counts: monitor_fraction must be > 0");

  const auto p = probabilities(rho.matrix());
  std::vector<CountRecord> out;
  out.reserve(static_cast<std::size_t>(n_repetitions) * 6);
  for (int rep = 1; rep <= n_repetitions; ++rep) {
    for (Basis b : kAllBases) {
      std::mt19937_64 rng(stream_seed(seed, k, rep, b));
      const double mean = shots_mean * std::max(p[basis_index(b)], 0.0);
      const std::uint64_t c = poisson(rng, mean);
      const std::uint64_t m = std::max<std::uint64_t>(poisson(rng, shots_mean * monitor_fraction), 1);
      out.push_back(CountRecord{k, rep, b, c, m});
    }
  }
  return out;
}

double log_likelihood(const CMatrix& rho, const BasisFrequencies& n) {
  const auto p = probabilities(rho);
  double ll = 0.0;
  for (std::size_t j = 0; j < 6; ++j) {
    if (n[j] == 0.0) continue;
    if (p[j] <= 0.0) return -std::numeric_limits<double>::infinity();
    ll += n[j] * std::log(p[j] / 3.0);
  }
  return ll;
}

TomographyResult mle_reconstruct(const BasisFrequencies& n, const MleOptions& options) {
  double total = 0.0;
  for (double v : n) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("mle_reconstruct: negative or non-finite count");
    total += v;
  }
  if (total <= 0.0) throw std::invalid_argument("mle_reconstruct: all counts are zero");

  CMatrix rho = linear_inversion_start(n);
  double ll = log_likelihood(rho, n);
  if (!std::isfinite(ll)) {
    rho = 0.999999 * rho + 0.000001 * CMatrix::Identity(2, 2) / 2.0;
    ll = log_likelihood(rho, n);
  }
  std::vector<double> trace{ll};

  double dilution = 1.0;
  bool converged = false;
  int iterations = 0;
  while (iterations < options.max_iterations) {
    ++iterations;
    const auto p = probabilities(rho);
    CMatrix r = CMatrix::Zero(2, 2);
    for (std::size_t j = 0; j < 6; ++j) {
      if (n[j] > 0.0) r += (n[j] / (total * p[j])) * projectors()[j];
    }
    const CMatrix step = hermitian_normalized(r * rho * r);
    const CMatrix candidate = hermitian_normalized((1.0 - dilution) * rho + dilution * step);
    const double update = max_abs_entry(candidate - rho);
    const double ll_candidate = log_likelihood(candidate, n);
    if (ll_candidate < ll) {
      // Overshoot: shrink the step toward the current iterate.
      dilution *= 0.5;
      if (update < options.tolerance) {
        converged = true;
        break;
      }
      continue;
    }
    rho = candidate;
    ll = ll_candidate;
    trace.push_back(ll);
    if (update < options.tolerance) {
      converged = true;
      break;
    }
  }
  return TomographyResult{DensityMatrix(rho), ll, iterations, converged, std::move(trace)};
}

TomographyResult mle_reconstruct(std::span<const CountRecord> records, const MleOptions& options) {
  BasisFrequencies n{};
  std::array<bool, 6> seen{};
  for (const auto& rec : records) {
    const auto j = basis_index(rec.basis);
    if (seen[j]) throw std::invalid_argument(fmt::format("mle_reconstruct: basis {} listed twice", basis_label(rec.basis)));
    if (rec.k != records.front().k || rec.repetition != records.front().repetition) {
      throw std::invalid_argument("mle_reconstruct: records span several acquisitions");
    }
    seen[j] = true;
    n[j] = static_cast<double>(rec.counts);
  }
  for (Basis b : kAllBases) {
    if (!seen[basis_index(b)]) {
      throw std::invalid_argument(fmt::format("mle_reconstruct: missing basis {}", basis_label(b)));
    }
  }
  return mle_reconstruct(n, options);
}

double loss_rate(std::span<const CountRecord> records) {
  std::array<double, 6> c{};
  std::array<double, 6> m{};
  std::array<int, 6> count{};
  for (const auto& rec : records) {
    const auto j = basis_index(rec.basis);
    if (rec.monitor == 0) throw std::invalid_argument("loss_rate: zero monitor count");
    c[j] += static_cast<double>(rec.counts);
    m[j] += static_cast<double>(rec.monitor);
    ++count[j];
  }
  double total = 0.0;
  for (std::size_t j = 0; j < 6; ++j) {
    if (count[j] == 0) throw std::invalid_argument(fmt::format("loss_rate: no records for basis {}", "HVDALR"[j]));
    total += c[j] / m[j];  // the repetition counts cancel in the ratio of means
  }
  return total;
}

RunSummary summarize(std::span<const TomographyResult> results, const Ket& target,
                     std::span<const CountRecord> records, double reference_loss) {
  const std::size_t n = results.size();
  if (n < 2) throw std::invalid_argument(fmt::format("summarize: need at least 2 repetitions, got {}", n));
  if (!(reference_loss > 0.0)) throw std::invalid_argument("summarize: reference loss must be > 0");

  std::vector<double> f(n);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const DensityMatrix rho = results[i].rho_hat.normalized();
    f[i] = fidelity(rho, target);
    p[i] = purity(rho);
  }
  auto mean_and_stderr = [n](const std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::pair{mean, std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)))};
  };
  RunSummary out;
  out.k = records.empty() ? 0 : records.front().k;
  std::tie(out.F_mean, out.F_stderr) = mean_and_stderr(f);
  std::tie(out.P_mean, out.P_stderr) = mean_and_stderr(p);
  out.p_sur_hat = std::clamp(loss_rate(records) / reference_loss, 0.0, 1.0);
  return out;
}

std::vector<std::vector<CountRecord>> group_by_acquisition(std::span<const CountRecord> records) {
  std::map<std::pair<int, int>, std::vector<CountRecord>> groups;
  for (const auto& rec : records) groups[{rec.k, rec.repetition}].push_back(rec);
  std::vector<std::vector<CountRecord>> out;
  out.reserve(groups.size());
  for (auto& [key, group] : groups) out.push_back(std::move(group));
  return out;
}

void write_counts_csv(std::ostream& out, std::span<const CountRecord> records) {
  out << "k,repetition,basis,counts,monitor\n";
  for (const auto& r : records) {
    out << r.k << ',' << r.repetition << ',' << basis_label(r.basis) << ',' << r.counts << ',' << r.monitor << '\n';
  }
}

std::vector<CountRecord> read_counts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("counts csv: empty input");
  const auto header = csv::split(line);
  if (header != std::vector<std::string>{"k", "repetition", "basis", "counts", "monitor"}) {
    throw std::invalid_argument("counts csv: header must be k,repetition,basis,counts,monitor");
  }
  std::vector<CountRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::split(line);
    if (f.size() != 5) throw std::invalid_argument(fmt::format("counts csv line {}: expected 5 fields", line_no));
    CountRecord r;
    r.k = static_cast<int>(parse_uint(f[0], "k", line_no));
    r.repetition = static_cast<int>(parse_uint(f[1], "repetition", line_no));
    r.basis = parse_basis(f[2]);
    r.counts = parse_uint(f[3], "counts", line_no);
    r.monitor = parse_uint(f[4], "monitor", line_no);
    if (r.monitor == 0) throw std::invalid_argument(fmt::format("counts csv line {}: monitor must be > 0", line_no));
    out.push_back(r);
  }
  return out;
}

}  // namespace qsup
