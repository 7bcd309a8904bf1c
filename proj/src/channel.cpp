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

#include "qsup/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace qsup {

namespace {

// A projection whose output norm² falls below this fraction of its input is
// treated as having annihilated the state.
constexpr double kZeroRelative = 1e-24;

Ket coupling_ket(double phi, BasisSide side) { return basis_ket(phi, side); }

// Columns |φ>, |φ⊥> in the computational basis.
CMatrix coupling_basis(double phi) {
  CMatrix b(2, 2);
  b << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return b;
}

void require_qubit(const Ket& k, const char* what) {
  if (k.dim() != 2) throw std::invalid_argument(fmt::format("{}: expected a qubit, got dim {}", what, k.dim()));
  if (!k.is_normalized()) throw std::invalid_argument(fmt::format("{}: ket is not normalized", what));
}

GaussianSuperposition zero_like(const GaussianSuperposition& env) { return env.scaled(0.0); }

}  // namespace

void ChannelConfig::validate() const {
  for (double angle : {psi, xi, phi}) {
    if (!std::isfinite(angle)) throw std::invalid_argument("ChannelConfig: non-finite angle");
  }
  if (!std::isfinite(d_per_block) || d_per_block < 0.0) {
    throw std::invalid_argument(fmt::format("ChannelConfig: d_per_block must be >= 0, got {}", d_per_block));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument(fmt::format("ChannelConfig: sigma must be > 0, got {}", sigma));
  }
  if (n_blocks < 0) throw std::invalid_argument(fmt::format("ChannelConfig: n_blocks must be >= 0, got {}", n_blocks));
  if (!(passive_transmission_per_element > 0.0) || passive_transmission_per_element > 1.0) {
    throw std::invalid_argument(fmt::format("ChannelConfig: passive transmission must be in (0, 1], got {}",
                                            passive_transmission_per_element));
  }
}

// ---- JointState -----------------------------------------------------------

JointState::JointState(double phi, GaussianSuperposition env_phi, GaussianSuperposition env_perp, bool zero)
    : phi_(phi), env_phi_(std::move(env_phi)), env_perp_(std::move(env_perp)), zero_(zero) {
  if (!std::isfinite(phi_)) throw std::domain_error("JointState: non-finite coupling angle");
  if (env_phi_.sigma() != env_perp_.sigma()) throw std::invalid_argument("JointState: branch widths differ");
  if (norm_squared() > 1.0 + tol::kStructural) {
    throw std::invalid_argument(fmt::format("JointState: norm² {} exceeds 1", norm_squared()));
  }
}

JointState prepare(const Ket& qubit, double phi, double sigma) {
  require_qubit(qubit, "prepare");
  const Complex delta = inner(coupling_ket(phi, BasisSide::plus), qubit);
  const Complex eta = inner(coupling_ket(phi, BasisSide::perp), qubit);
  const auto env = GaussianSuperposition::single(sigma);
  return JointState(phi, env.scaled(delta), env.scaled(eta));
}

JointState prepare(const ChannelConfig& config) {
  config.validate();
  return prepare(basis_ket(config.psi), config.phi, config.sigma);
}

JointState decoherence_block(const JointState& state, double d) {
  if (!std::isfinite(d) || d < 0.0) throw std::invalid_argument("decoherence_block: d must be >= 0");
  return JointState(state.phi(), displace(state.env_phi(), d), state.env_perp(), state.is_zero());
}

JointState zeno_project(const JointState& state, const Ket& target) {
  require_qubit(target, "zeno_project");
  const Ket phi = coupling_ket(state.phi(), BasisSide::plus);
  const Ket perp = coupling_ket(state.phi(), BasisSide::perp);
  // Environment left attached to |target> after the projection.
  const GaussianSuperposition amp =
      combine(inner(target, phi), state.env_phi(), inner(target, perp), state.env_perp());
  const double before = state.norm_squared();
  if (state.is_zero() || amp.norm_squared() <= kZeroRelative * before) {
    return JointState(state.phi(), zero_like(state.env_phi()), zero_like(state.env_perp()), true);
  }
  return JointState(state.phi(), amp.scaled(inner(phi, target)), amp.scaled(inner(perp, target)));
}

Complex branch_overlap(const JointState& state) {
  const double a = state.env_phi().norm_squared();
  const double b = state.env_perp().norm_squared();
  if (a <= 0.0 || b <= 0.0) return {1.0, 0.0};
  return overlap(state.env_phi(), state.env_perp()) / std::sqrt(a * b);
}

DensityMatrix reduced_state(const JointState& state) {
  if (state.is_zero()) throw std::domain_error("reduced_state: state was annihilated by a projection");
  const auto& ep = state.env_phi();
  const auto& eq = state.env_perp();
  // ρ_ij = <E_j|E_i> in the coupling basis.
  CMatrix r(2, 2);
  r << overlap(ep, ep), overlap(eq, ep), overlap(ep, eq), overlap(eq, eq);
  const CMatrix b = coupling_basis(state.phi());
  const CMatrix rho = b * r * b.adjoint();
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

Dilation dilate(const JointState& state) {
  const double sigma = state.sigma();
  std::vector<double> centers;
  for (const auto* env : {&state.env_phi(), &state.env_perp()}) {
    for (const auto& c : env->components()) centers.push_back(c.center);
  }
  std::sort(centers.begin(), centers.end());
  std::vector<double> unique;
  for (double c : centers) {
    if (unique.empty() || c - unique.back() >= 1e-12 * sigma) unique.push_back(c);
  }
  const auto m = static_cast<Eigen::Index>(unique.size());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram_matrix(sigma, unique));
  const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  // G = F^T F with F = Λ^{1/2} V^T.
  const Eigen::MatrixXd factor = root.asDiagonal() * solver.eigenvectors().transpose();

  auto coordinates = [&](const GaussianSuperposition& env) {
    CVector w = CVector::Zero(m);
    for (const auto& c : env.components()) {
      const auto it = std::min_element(unique.begin(), unique.end(), [&](double x, double y) {
        return std::abs(x - c.center) < std::abs(y - c.center);
      });
      w(it - unique.begin()) += c.weight;
    }
    return CVector(factor.cast<Complex>() * w);
  };
  const CVector y_phi = coordinates(state.env_phi());
  const CVector y_perp = coordinates(state.env_perp());
  const Ket phi = coupling_ket(state.phi(), BasisSide::plus);
  const Ket perp = coupling_ket(state.phi(), BasisSide::perp);

  CVector joint(2 * m);
  for (Eigen::Index q = 0; q < 2; ++q) {
    joint.segment(q * m, m) = phi[static_cast<std::size_t>(q)] * y_phi + perp[static_cast<std::size_t>(q)] * y_perp;
  }
  return Dilation{Ket(std::move(joint)), static_cast<std::size_t>(m)};
}

SurvivalProduct survival_product(const ChannelConfig& config) {
  config.validate();
  if (!config.protect) throw std::invalid_argument("survival_product: requires a protected configuration");
  const Ket xi = basis_ket(config.xi);
  const double pd = std::norm(inner(coupling_ket(config.phi, BasisSide::plus), xi));
  const double pe = std::norm(inner(coupling_ket(config.phi, BasisSide::perp), xi));
  const int n_projections =
      config.project_after_last_block ? config.n_blocks : std::max(config.n_blocks - 1, 0);

  SurvivalProduct out;
  // Normalized environment carried by |ξ> between projections.
  auto env = GaussianSuperposition::single(config.sigma);
  for (int step = 0; step < n_projections; ++step) {
    const auto kicked = displace(env, config.d_per_block);
    const Complex c = overlap(kicked, env);
    const double factor = 1.0 - 2.0 * pd * pe * (1.0 - c.real());
    out.factors.push_back(factor);
    out.overlaps.push_back(c);
    out.value *= factor;
    if (factor <= 0.0) {
      out.value = 0.0;
      break;
    }
    env = combine(pd, kicked, pe, env).scaled(1.0 / std::sqrt(factor));
  }
  return out;
}

KrausMap dephasing_kraus(Complex overlap_c, double phi) {
  const double magnitude = std::abs(overlap_c);
  if (!std::isfinite(magnitude) || magnitude > 1.0 + tol::kNormalized) {
    throw std::invalid_argument(fmt::format("dephasing_kraus: |c| = {} exceeds 1", magnitude));
  }
  const double m = std::min(magnitude, 1.0);
  const double theta = magnitude > 0.0 ? std::arg(overlap_c) : 0.0;
  const CMatrix b = coupling_basis(phi);
  CMatrix phase = CMatrix::Identity(2, 2);
  phase(0, 0) = std::polar(1.0, -theta);
  CMatrix z = CMatrix::Identity(2, 2);
  z(1, 1) = -1.0;
  const CMatrix k0 = std::sqrt((1.0 + m) / 2.0) * b * phase * b.adjoint();
  const CMatrix k1 = std::sqrt((1.0 - m) / 2.0) * b * z * phase * b.adjoint();
  return KrausMap({Operator(k0, OperatorKind::kraus), Operator(k1, OperatorKind::kraus)}, true);
}

KrausMap qze_kraus(const ChannelConfig& config) {
  const double p = survival_product(config).value;
  const Operator pi_xi = projector(basis_ket(config.xi));
  return KrausMap({Operator(std::sqrt(p) * pi_xi.matrix(), OperatorKind::kraus)}, false);
}

Operator swap_operator(double xi) {
  if (!std::isfinite(xi)) throw std::domain_error("swap_operator: non-finite angle");
  // PBS on (qubit, path): |H,A>→|H,A>, |V,A>→|V,B>, completed to a unitary.
  CMatrix pbs = CMatrix::Zero(4, 4);
  pbs(0, 0) = pbs(1, 1) = 1.0;
  pbs(3, 2) = pbs(2, 3) = 1.0;
  auto rotation = [](double angle) {
    CMatrix r(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return Operator(r, OperatorKind::unitary);
  };
  const Operator arm_a = rotation(xi);                        // |H> -> |ξ>
  const Operator arm_b = rotation(xi - std::acos(-1.0) / 2);  // |V> -> |ξ>
  const Operator path_a = projector(Ket{1.0, 0.0});
  const Operator path_b = projector(Ket{0.0, 1.0});
  const CMatrix plates = tensor(arm_a, path_a).matrix() + tensor(arm_b, path_b).matrix();
  return Operator(plates * pbs, OperatorKind::unitary);
}

Ket swap_embed(const Ket& qubit, double xi) {
  require_qubit(qubit, "swap_embed");
  return swap_operator(xi).apply(tensor(qubit, Ket{1.0, 0.0}));
}

Ket reverse_swap(const Ket& embedded, double xi) {
  if (embedded.dim() != 4) throw std::invalid_argument("reverse_swap: expected a qubit⊗ancilla ket");
  return swap_operator(xi).adjoint().apply(embedded);
}

double passive_transmission(const ChannelConfig& config) {
  return std::pow(config.passive_transmission_per_element, config.n_blocks);
}

ChannelOutput run_channel(const ChannelConfig& config) { return run_channel(config, basis_ket(config.psi)); }

ChannelOutput run_channel(const ChannelConfig& config, const Ket& input) {
  config.validate();
  require_qubit(input, "run_channel");
  const double transmission = passive_transmission(config);
  std::vector<BlockRecord> trajectory;

  if (!config.protect) {
    auto state = prepare(input, config.phi, config.sigma);
    for (int b = 1; b <= config.n_blocks; ++b) {
      state = decoherence_block(state, config.d_per_block);
      trajectory.push_back({b, branch_overlap(state), 1.0});
    }
    const DensityMatrix rho = reduced_state(state).scaled(transmission);
    return ChannelOutput{rho, rho.trace(), std::move(trajectory)};
  }

  // Both interferometer arms carry the same known polarization |ξ> through
  // identical blocks and polarizers, so one arm's evolution describes both.
  const Ket xi = basis_ket(config.xi);
  auto arm = prepare(xi, config.phi, config.sigma);
  for (int b = 1; b <= config.n_blocks; ++b) {
    arm = decoherence_block(arm, config.d_per_block);
    BlockRecord record{b, branch_overlap(arm), 1.0};
    if (b < config.n_blocks || config.project_after_last_block) {
      const double before = arm.norm_squared();
      arm = zeno_project(arm, xi);
      if (arm.is_zero()) {
        throw std::runtime_error(fmt::format("run_channel: projection {} annihilated the protected state", b));
      }
      record.step_factor = arm.norm_squared() / before;
    }
    trajectory.push_back(record);
  }
  const DensityMatrix arm_state = reduced_state(arm);

  const DensityMatrix swapped = DensityMatrix::from_ket(swap_embed(input, config.xi));
  const DensityMatrix ancilla = partial_trace(swapped, 2, 2, Keep::right);
  const DensityMatrix expected = tensor(DensityMatrix::from_ket(xi), ancilla);
  if (max_abs_entry(swapped.matrix() - expected.matrix()) > tol::kStructural) {
    throw std::logic_error("run_channel: swap did not leave the qubit in |xi>");
  }
  const DensityMatrix restored = evolve(swap_operator(config.xi).adjoint(), tensor(arm_state, ancilla));
  // Bob detects the output port carrying path |A>; anything left in |B> is lost.
  CMatrix port(2, 2);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) port(i, j) = restored.matrix()(2 * i, 2 * j);
  const DensityMatrix rho = DensityMatrix(port * transmission);
  return ChannelOutput{rho, rho.trace(), std::move(trajectory)};
}

}  // namespace qsup
