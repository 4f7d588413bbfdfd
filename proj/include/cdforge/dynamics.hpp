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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdforge/spectral.hpp"
#include "cdforge/variational.hpp"

namespace cdforge {

enum class QuenchKind { Linear, Cubic };

/// Field schedule B(t).
///   linear: B(t) = B0 - v t on [0, (B0 - Bf) / v]
///   cubic:  B(s) = B0 + 3 (Bf - B0) s^2 - 2 (Bf - B0) s^3, s = t / tau, on [0, tau]
struct QuenchProtocol {
  QuenchKind kind = QuenchKind::Linear;
  double b0 = 2.0;
  double bf = 0.0;
  double rate = 1.0;  // v, linear only
  double tau = 1.0;   // cubic only

  static QuenchProtocol linear(double b0, double v, double bf = 0.0);
  static QuenchProtocol cubic(double b0, double bf, double tau);

  /// Throws ConfigError on v == 0, a linear end field behind the start, or tau <= 0.
  void validate() const;
  double duration() const;
};

/// Throw DomainError outside [0, duration].
double field(const QuenchProtocol& protocol, double t);
double field_rate(const QuenchProtocol& protocol, double t);

/// Time at which B(t) = |J0|. Closed form for linear quenches, bisection to
/// 1e-12 in s for cubic ones. Throws DomainError when the schedule never
/// reaches the critical field.
double critical_time(const QuenchProtocol& protocol, double coupling);

enum class DrivingKind {
  Bare,     ///< H0 alone
  Ansatz,   ///< H0 plus the variationally fitted control term
  ExactCd,  ///< H0 plus the exact auxiliary matrix
};

struct Driving {
  DrivingKind kind = DrivingKind::Bare;
  AnsatzSpec ansatz;

  static Driving bare() { return {}; }
  static Driving exact() { return {DrivingKind::ExactCd, {}}; }
  static Driving with(AnsatzSpec spec) { return {DrivingKind::Ansatz, std::move(spec)}; }
  std::string label() const;
};

struct PropagationConfig {
  /// Integrator step; zero selects dt_fraction * protocol duration.
  double dt = 0.0;
  double dt_fraction = 1e-3;
  /// Step halvings allowed while the final fidelity moves by more than convergence_tol.
  int max_refinements = 6;
  double convergence_tol = 1e-6;
  bool check_convergence = true;
  double norm_tol = 1e-9;
  /// When false the control amplitudes are solved once per output interval.
  bool resolve_aux_every_step = true;
  bool record_amplitudes = false;
  double cutoff = 1e-10;
  std::optional<double> gap_tol;
  Eigen::Index level = 0;

  void validate() const;
};

struct TrajectoryRecord {
  std::string label;
  std::vector<double> times;
  std::vector<double> fields;
  std::vector<double> fidelity;
  std::vector<double> defect_density;
  /// Cost of the variational solve at each output time; the h = 0 cost for
  /// bare driving and zero for exact driving.
  std::vector<double> residual;
  /// Amplitudes solved at each output time (ansatz driving with record_amplitudes).
  std::vector<RealVector> amplitudes;
  std::vector<PauliString> strings;

  double dt_used = 0.0;
  int refinements = 0;
  /// |F_final(2 dt_used) - F_final(dt_used)|; NaN when convergence was not checked.
  double convergence_delta = 0.0;
  double norm_drift = 0.0;

  double final_fidelity() const { return fidelity.back(); }
  double final_defect_density() const { return defect_density.back(); }
  double max_residual() const;
};

/// |<a|b>|^2. Throws ConfigError on a dimension mismatch.
double fidelity(const StateVector& a, const StateVector& b);

/// `points` equally spaced times covering [t0, t1].
std::vector<double> uniform_grid(double t0, double t1, int points);

/// Unitary exponential midpoint propagation of psi0 under H0(B(t)) plus the
/// requested control term, recording fidelity against the gauge-tracked
/// instantaneous eigenstate at every time in t_grid. With check_convergence
/// the step is halved until the final fidelity changes by at most
/// convergence_tol; ConvergenceError after max_refinements.
TrajectoryRecord propagate(const IsingModel& model, const QuenchProtocol& protocol,
                           const Driving& driving, const StateVector& psi0,
                           const PropagationConfig& config, std::span<const double> t_grid);

/// exp(-i H dt) psi through the eigendecomposition of H.
ComplexVector evolve_spectral(const HermitianMatrix& h, const ComplexVector& psi, double dt);

}  // namespace cdforge
