// Copyright 2026 The cdforge Authors
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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdforge/pauli.hpp"
#include "cdforge/spectral.hpp"

namespace cdforge {

enum class AnsatzMode { Patterns, CanonicalFull };

/// Declarative description of a restricted K-body, range-R operator set.
struct AnsatzSpec {
  AnsatzMode mode = AnsatzMode::Patterns;
  int max_body = 2;
  int range = 1;
  /// Component tuples, one Pauli per body (patterns mode only).
  std::vector<std::vector<Pauli>> patterns;
  /// Free-form name used in result tables; derived when empty.
  std::string label;

  /// Throws ConfigError unless 1 <= max_body <= n_sites,
  /// max_body - 1 <= range <= n_sites - 1, and patterns are well-formed.
  void validate(int n_sites) const;
  std::string display_label() const;

  /// The y-z pair interaction over the whole chain.
  static AnsatzSpec two_body_yz(int n_sites);
  static AnsatzSpec canonical(int max_body, int range);
};

struct OperatorBasis {
  std::vector<PauliString> strings;
  AnsatzSpec spec;
  int n_sites = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(strings.size()); }
};

/// Deduplicated operator list ordered by support size, then sites, then
/// components. Range is enforced on every pair of sites in a string.
OperatorBasis enumerate_basis(const AnsatzSpec& spec, int n_sites);

/// Normal equations gram * h = target of the quadratic cost
///   || (H_aux - sum_I h_I P_I) |psi> ||^2.
struct NormalSystem {
  RealMatrix gram;
  RealVector target;
  /// ||H_aux psi||^2, or Tr[rho H_aux^2] for a density matrix.
  double aux_norm_sq = 0.0;
  /// State the system was built on; empty for the trace-form oracle.
  ComplexVector state_ref;
  /// P_I psi and H_aux psi stacked as [Re; Im]; empty for the trace-form oracle.
  RealMatrix images;
  RealVector aux_image;
};

/// Pure-state assembly: gram(I', I) = 2 Re<Phi_I'|Phi_I>, target(I) = 2 Re<Phi_I|Phi_aux>.
NormalSystem build_system(const OperatorBasis& basis, const StateVector& psi, const AuxMatrix& aux);
/// Same, with Phi_aux = H_aux psi supplied directly.
NormalSystem build_system(const OperatorBasis& basis, const StateVector& psi,
                          const ComplexVector& aux_image);

/// Trace form, valid for mixed states: A = Tr[rho {P', P}], C = Tr[rho {H_aux, P}].
/// Throws ContractError unless rho is Hermitian, unit trace and PSD within 1e-10.
NormalSystem oracle_system(const OperatorBasis& basis, const DensityMatrix& rho,
                           const AuxMatrix& aux);

struct AuxSolution {
  RealVector amplitudes;
  double residual = 0.0;
  int rank = 0;
  double cutoff = 0.0;
  /// Gram eigenvalues, ascending.
  RealVector gram_spectrum;
};

/// Minimum-norm least-squares solution from the eigendecomposition of the
/// gram matrix, dropping eigenvalues below cutoff * (largest eigenvalue).
/// Blocks of the gram matrix that decouple exactly are solved separately.
/// Throws RankDeficiencyError when nothing survives the cutoff but the target
/// is nonzero, ConfigError when cutoff is outside (0, 1).
AuxSolution solve(const NormalSystem& system, double cutoff = 1e-10);

/// Cost evaluated directly from the operator action.
double residual(const OperatorBasis& basis, const RealVector& h, const StateVector& psi,
                const AuxMatrix& aux);
double residual(const OperatorBasis& basis, const RealVector& h, const StateVector& psi,
                const ComplexVector& aux_image);

/// (1/2) 4^K N! / (N - K)!, the count of K-body couplings as experimental
/// resources. Throws ResourceError if the value overflows 64 bits.
std::uint64_t paper_resource_count(int n_sites, int k_body);

}  // namespace cdforge
