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

#ifndef QSUP_ENVIRONMENT_HPP
#define QSUP_ENVIRONMENT_HPP

#include <cstddef>
#include <vector>

#include "qsup/qstate.hpp"

namespace qsup {

// Inner product of two unit-norm Gaussian wavepackets of equal width sigma
// (sigma is the standard deviation of |amplitude|²) centred at a and b:
//   G(a, b) = exp(−(a − b)² / (8 sigma²)).
class OverlapKernel {
 public:
  explicit OverlapKernel(double sigma);
  double sigma() const { return sigma_; }
  double operator()(double a, double b) const;

 private:
  double sigma_;
};

struct GaussianComponent {
  double center = 0.0;
  Complex weight{1.0, 0.0};
};

// Transverse spatial mode written as Σ w_i g(x − c_i), where g is the unit-norm
// Gaussian of width sigma. Components are kept sorted by centre and merged when
// their centres differ by less than 1e-12·sigma.
class GaussianSuperposition {
 public:
  GaussianSuperposition(double sigma, std::vector<GaussianComponent> components);
  // A single unit-weight Gaussian centred at `center`.
  static GaussianSuperposition single(double sigma, double center = 0.0);

  double sigma() const { return sigma_; }
  const std::vector<GaussianComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

  double norm_squared() const;
  GaussianSuperposition scaled(Complex factor) const;
  // Wavefunction value at x.
  Complex evaluate(double x) const;

  double min_center() const { return components_.front().center; }
  double max_center() const { return components_.back().center; }

 private:
  double sigma_;
  std::vector<GaussianComponent> components_;
};

// Rigid translation by d: the action of exp(−i γ t P_x) with d = γ t.
GaussianSuperposition displace(const GaussianSuperposition& env, double d);

// <a|b> = Σ_ij conj(w_ai) w_bj G(c_ai, c_bj). Widths must match.
Complex overlap(const GaussianSuperposition& a, const GaussianSuperposition& b);

// alpha·a + beta·b.
GaussianSuperposition combine(Complex alpha, const GaussianSuperposition& a, Complex beta,
                              const GaussianSuperposition& b);

// Gram matrix G(c_i, c_j) over the given centres.
Eigen::MatrixXd gram_matrix(double sigma, const std::vector<double>& centers);

struct GridSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n_points = 0;
};

// Smallest grid accepted by grid_oracle_overlap for the pair (a, b).
GridSpec default_grid(const GaussianSuperposition& a, const GaussianSuperposition& b,
                      std::size_t n_points = 4096);

// Trapezoidal quadrature of ∫ conj(a(x)) b(x) dx. Independent of the
// closed-form kernel; used to check `overlap`.
Complex grid_oracle_overlap(const GaussianSuperposition& a, const GaussianSuperposition& b,
                            const GridSpec& grid);

}  // namespace qsup

#endif  // QSUP_ENVIRONMENT_HPP
