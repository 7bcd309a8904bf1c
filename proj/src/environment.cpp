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

#include "qsup/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace qsup {

namespace {

constexpr double kMergeFraction = 1e-12;
constexpr double kOracleMarginSigmas = 8.0;
constexpr std::size_t kOracleMinPoints = 2048;

void require_same_width(const GaussianSuperposition& a, const GaussianSuperposition& b, const char* what) {
  if (a.sigma() != b.sigma()) {
    throw std::invalid_argument(fmt::format("{}: width mismatch ({} vs {})", what, a.sigma(), b.sigma()));
  }
}

}  // namespace

OverlapKernel::OverlapKernel(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument(fmt::format("OverlapKernel: sigma must be positive, got {}", sigma));
  }
}

double OverlapKernel::operator()(double a, double b) const {
  const double delta = a - b;
  return std::exp(-delta * delta / (8.0 * sigma_ * sigma_));
}

GaussianSuperposition::GaussianSuperposition(double sigma, std::vector<GaussianComponent> components)
    : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument(fmt::format("GaussianSuperposition: sigma must be positive, got {}", sigma));
  }
  if (components.empty()) throw std::invalid_argument("GaussianSuperposition: no components");
  for (const auto& c : components) {
    if (!std::isfinite(c.center)) throw std::domain_error("GaussianSuperposition: non-finite centre");
    if (!std::isfinite(c.weight.real()) || !std::isfinite(c.weight.imag())) {
      throw std::domain_error("GaussianSuperposition: non-finite weight");
    }
  }
  std::stable_sort(components.begin(), components.end(),
                   [](const GaussianComponent& x, const GaussianComponent& y) { return x.center < y.center; });
  const double merge_distance = kMergeFraction * sigma;
  components_.reserve(components.size());
  for (const auto& c : components) {
    if (!components_.empty() && c.center - components_.back().center < merge_distance) {
      components_.back().weight += c.weight;
    } else {
      components_.push_back(c);
    }
  }
}

GaussianSuperposition GaussianSuperposition::single(double sigma, double center) {
  return GaussianSuperposition(sigma, {GaussianComponent{center, 1.0}});
}

double GaussianSuperposition::norm_squared() const {
  const double n = overlap(*this, *this).real();
  return std::max(n, 0.0);
}

GaussianSuperposition GaussianSuperposition::scaled(Complex factor) const {
  auto comps = components_;
  for (auto& c : comps) c.weight *= factor;
  return GaussianSuperposition(sigma_, std::move(comps));
}

Complex GaussianSuperposition::evaluate(double x) const {
  // g(x) = (2π σ²)^(-1/4) exp(−x² / (4σ²)), so that ∫|g|² = 1.
  const double prefactor = std::pow(2.0 * std::numbers::pi * sigma_ * sigma_, -0.25);
  Complex value{0.0, 0.0};
  for (const auto& c : components_) {
    const double u = x - c.center;
    value += c.weight * prefactor * std::exp(-u * u / (4.0 * sigma_ * sigma_));
  }
  return value;
}

GaussianSuperposition displace(const GaussianSuperposition& env, double d) {
  if (!std::isfinite(d)) throw std::domain_error("displace: non-finite displacement");
  auto comps = env.components();
  for (auto& c : comps) c.center += d;
  return GaussianSuperposition(env.sigma(), std::move(comps));
}

Complex overlap(const GaussianSuperposition& a, const GaussianSuperposition& b) {
  require_same_width(a, b, "overlap");
  const OverlapKernel kernel(a.sigma());
  Complex sum{0.0, 0.0};
  for (const auto& ca : a.components()) {
    for (const auto& cb : b.components()) sum += std::conj(ca.weight) * cb.weight * kernel(ca.center, cb.center);
  }
  return sum;
}

GaussianSuperposition combine(Complex alpha, const GaussianSuperposition& a, Complex beta,
                              const GaussianSuperposition& b) {
  require_same_width(a, b, "combine");
  std::vector<GaussianComponent> comps;
  comps.reserve(a.size() + b.size());
  for (const auto& c : a.components()) comps.push_back({c.center, alpha * c.weight});
  for (const auto& c : b.components()) comps.push_back({c.center, beta * c.weight});
  return GaussianSuperposition(a.sigma(), std::move(comps));
}

Eigen::MatrixXd gram_matrix(double sigma, const std::vector<double>& centers) {
  const OverlapKernel kernel(sigma);
  const auto n = static_cast<Eigen::Index>(centers.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = kernel(centers[static_cast<std::size_t>(i)], centers[static_cast<std::size_t>(j)]);
  return g;
}

GridSpec default_grid(const GaussianSuperposition& a, const GaussianSuperposition& b, std::size_t n_points) {
  const double margin = kOracleMarginSigmas * a.sigma();
  return GridSpec{std::min(a.min_center(), b.min_center()) - margin,
                  std::max(a.max_center(), b.max_center()) + margin, std::max(n_points, kOracleMinPoints)};
}

Complex grid_oracle_overlap(const GaussianSuperposition& a, const GaussianSuperposition& b,
                            const GridSpec& grid) {
  require_same_width(a, b, "grid_oracle_overlap");
  if (grid.n_points < kOracleMinPoints) {
    throw std::invalid_argument(fmt::format("grid_oracle_overlap: need >= {} points, got {}", kOracleMinPoints,
                                            grid.n_points));
  }
  const double margin = kOracleMarginSigmas * a.sigma();
  const double lo = std::min(a.min_center(), b.min_center()) - margin;
  const double hi = std::max(a.max_center(), b.max_center()) + margin;
  if (grid.x_min > lo || grid.x_max < hi) {
    throw std::invalid_argument(fmt::format("grid_oracle_overlap: grid [{}, {}] does not cover [{}, {}]",
                                            grid.x_min, grid.x_max, lo, hi));
  }
  const double h = (grid.x_max - grid.x_min) / static_cast<double>(grid.n_points - 1);
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double x = grid.x_min + h * static_cast<double>(i);
    const double w = (i == 0 || i + 1 == grid.n_points) ? 0.5 : 1.0;
    sum += w * std::conj(a.evaluate(x)) * b.evaluate(x);
  }
  return sum * h;
}

}  // namespace qsup
