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

#ifndef QSUP_CHANNEL_HPP
#define QSUP_CHANNEL_HPP

#include <cstddef>
#include <vector>

#include "qsup/environment.hpp"
#include "qsup/qstate.hpp"

namespace qsup {

// One run through the decoherence-inducing channel. Angles in radians; lengths
// in the same arbitrary unit as sigma.
struct ChannelConfig {
  double psi = 0.0;  // input |ψ> = cos ψ|H> + sin ψ|V>
  double xi = 0.0;   // protected state |ξ>
  double phi = 0.0;  // coupling basis {|φ>, |φ⊥>}
  double d_per_block = 0.0;
  double sigma = 1.0;
  int n_blocks = 0;
  bool protect = false;
  bool project_after_last_block = true;
  double passive_transmission_per_element = 1.0;

  void validate() const;
};

// Pure qubit⊗environment state |φ>⊗|Ẽ_φ> + |φ⊥>⊗|Ẽ_φ⊥>, with the qubit
// amplitudes absorbed into the (unnormalized) environment branches. The
// squared norm is the probability of every projection applied so far.
class JointState {
 public:
  JointState(double phi, GaussianSuperposition env_phi, GaussianSuperposition env_perp, bool zero = false);

  double phi() const { return phi_; }
  const GaussianSuperposition& env_phi() const { return env_phi_; }
  const GaussianSuperposition& env_perp() const { return env_perp_; }
  double sigma() const { return env_phi_.sigma(); }

  double norm_squared() const { return env_phi_.norm_squared() + env_perp_.norm_squared(); }
  // Set when a projection annihilated the state.
  bool is_zero() const { return zero_; }

 private:
  double phi_;
  GaussianSuperposition env_phi_;
  GaussianSuperposition env_perp_;
  bool zero_;
};

JointState prepare(const Ket& qubit, double phi, double sigma);
JointState prepare(const ChannelConfig& config);

// One birefringent block: the |φ> branch is translated by d, |φ⊥> is untouched.
JointState decoherence_block(const JointState& state, double d);

// Π_target ⊗ 1_E.
JointState zeno_project(const JointState& state, const Ket& target);

// <Ẽ_φ|Ẽ_φ⊥> / (‖Ẽ_φ‖‖Ẽ_φ⊥‖); 1 when either branch is empty.
Complex branch_overlap(const JointState& state);

// Tr_E |Ψ><Ψ| in the computational basis, evaluated from closed-form overlaps.
DensityMatrix reduced_state(const JointState& state);

// Finite-dimensional embedding of the joint state: the environment span is
// mapped onto C^env_dim through a square-root factor of its Gram matrix, so
// inner products are preserved exactly. Layout is qubit (left) ⊗ environment.
struct Dilation {
  Ket joint;
  std::size_t env_dim;
};
Dilation dilate(const JointState& state);

struct SurvivalProduct {
  double value = 1.0;
  std::vector<double> factors;
  std::vector<Complex> overlaps;  // <E_φ^(k)|E_φ⊥^(k)> for each projected step
};

// Product formula over renormalized per-step environment branches. Computed
// without tracking the joint state, so it can be checked against the
// simulated norm.
SurvivalProduct survival_product(const ChannelConfig& config);

// Trace-preserving dephasing in the {|φ>, |φ⊥>} basis multiplying the
// (φ⊥, φ) coherence by overlap_c = <E_φ|E_φ⊥> and (φ, φ⊥) by its conjugate.
KrausMap dephasing_kraus(Complex overlap_c, double phi);

// Single-operator map sqrt(p_sur)·|ξ><ξ|.
KrausMap qze_kraus(const ChannelConfig& config);

// Qubit ⊗ path-ancilla swap (|A> = index 0, |B> = index 1): a PBS sending
// |H>→A, |V>→B followed by per-arm rotations taking |H> (arm A) and |V>
// (arm B) onto |ξ>.
Operator swap_operator(double xi);
// S (qubit ⊗ |A>) = |ξ> ⊗ (α|A> + β|B>).
Ket swap_embed(const Ket& qubit, double xi);
Ket reverse_swap(const Ket& embedded, double xi);

struct BlockRecord {
  int block = 0;             // 1-based
  Complex overlap{1.0, 0.0};  // normalized branch overlap right after the block
  double step_factor = 1.0;   // projection survival factor (1 without projection)
};

struct ChannelOutput {
  DensityMatrix rho_out;  // unnormalized; trace = survival_probability
  double survival_probability;
  std::vector<BlockRecord> trajectory;
};

// t^n_blocks with one lossy element per block.
double passive_transmission(const ChannelConfig& config);

ChannelOutput run_channel(const ChannelConfig& config);
// Same channel with an arbitrary (possibly complex) input qubit instead of |ψ>.
ChannelOutput run_channel(const ChannelConfig& config, const Ket& input);

}  // namespace qsup

#endif  // QSUP_CHANNEL_HPP
