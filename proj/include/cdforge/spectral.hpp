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

#include <functional>
#include <optional>
#include <vector>

#include "cdforge/pauli.hpp"

namespace cdforge {

/// Open transverse-field Ising chain
///   H0(B) = -B sum_j sigma^x_j + J0 sum_j sigma^z_j sigma^z_{j+1}.
struct IsingModel {
  int n_sites = 1;
  double coupling = 1.0;

  /// Throws ConfigError unless n_sites >= 1 and the coupling is finite and
  /// nonzero for chains with at least one bond.
  void validate() const;
};

/// Dense H0(B). Throws ResourceError above max_sites.
HermitianMatrix build_hamiltonian(const IsingModel& model, double field,
                                  int max_sites = kDefaultMaxDenseSites);
/// dH0/dB = -sum_j sigma^x_j.
HermitianMatrix field_derivative(const IsingModel& model, int max_sites = kDefaultMaxDenseSites);

/// Full eigensystem at one field value. Eigenvalues ascend; each eigenvector
/// has its largest-magnitude amplitude real and positive.
struct SpectralSnapshot {
  double field = 0.0;
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
  /// Symmetry sector of each level (see symmetry.hpp). All zero when the
  /// snapshot came from an unstructured matrix, in which case every pair of
  /// levels is treated as coupled.
  std::vector<int> sectors;
  bool symmetry_resolved = false;

  Eigen::Index size() const { return eigenvalues.size(); }
  double spectral_width() const { return eigenvalues(size() - 1) - eigenvalues(0); }
  /// Default degeneracy threshold, 1e-8 times the spectral width.
  double default_gap_tol() const;
  bool coupled(Eigen::Index m, Eigen::Index n) const {
    return !symmetry_resolved || sectors[m] == sectors[n];
  }
};

/// Diagonalizes an arbitrary Hermitian matrix. Throws ContractError if
/// ||H - H^dagger||_max exceeds herm_tol * max(1, ||H||_max).
SpectralSnapshot diagonalize(const HermitianMatrix& h, double field = 0.0, double herm_tol = 1e-10);

/// Diagonalizes H0(B) block by block in the flip/reflection sectors. Levels
/// that tie within 1e-12 of the spectral width are ordered by sector index.
SpectralSnapshot diagonalize(const IsingModel& model, double field);

/// Exact auxiliary term for the driven parameter lambda:
///   H_aux = i lambdadot sum_{m != n} |m><m| dH |n><n| / (E_n - E_m).
struct AuxMatrix {
  HermitianMatrix matrix;
  double field_rate = 0.0;
};

/// Throws DegeneracyError when two coupled levels lie within gap_tol
/// (default: snapshot.default_gap_tol()). Zero field_rate returns zero
/// without inspecting the spectrum.
AuxMatrix exact_aux(const SpectralSnapshot& snapshot, const HermitianMatrix& dh_dlambda,
                    double field_rate, std::optional<double> gap_tol = std::nullopt);

/// H_aux |E_level> without forming H_aux; O(4^N). Only pairs that involve
/// `level` are checked for degeneracy.
ComplexVector aux_action(const SpectralSnapshot& snapshot, const HermitianMatrix& dh_dlambda,
                         double field_rate, Eigen::Index level,
                         std::optional<double> gap_tol = std::nullopt);

/// Eigenvector `level` with its global phase fixed: <prev|out> real positive
/// when prev is given, otherwise largest-magnitude amplitude real positive.
/// Throws DegeneracyError if another coupled level lies within gap_tol and
/// TrackingError if |<prev|out>| < overlap_floor.
StateVector adiabatic_state(const SpectralSnapshot& snapshot, Eigen::Index level,
                            const StateVector* prev = nullptr,
                            std::optional<double> gap_tol = std::nullopt,
                            double overlap_floor = 1e-6);

using FieldPath = std::function<double(double)>;

StateVector adiabatic_state(const IsingModel& model, const FieldPath& field_path, double t,
                            Eigen::Index level, const StateVector* prev = nullptr,
                            std::optional<double> gap_tol = std::nullopt);

}  // namespace cdforge
