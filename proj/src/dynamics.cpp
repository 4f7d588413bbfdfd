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

#include "cdforge/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cdforge/errors.hpp"
#include "cdforge/kernels.hpp"
#include "cdforge/symmetry.hpp"

namespace cdforge {
namespace {

// Slack on the protocol domain for times produced by accumulated sums.
constexpr double kDomainSlack = 1e-12;

double clamp_to_domain(const QuenchProtocol& p, double t) {
  const double end = p.duration();
  const double slack = kDomainSlack * std::max(1.0, end);
  if (!(t >= -slack && t <= end + slack)) {
    throw DomainError("time " + std::to_string(t) + " outside the protocol domain [0, " +
                      std::to_string(end) + "]");
  }
  return std::clamp(t, 0.0, end);
}

// Everything one integration run needs that does not change with dt.
struct Context {
  const IsingModel& model;
  const QuenchProtocol& protocol;
  const Driving& driving;
  const PropagationConfig& config;
  HermitianMatrix dh;
  OperatorBasis basis;
  SymmetryBasis sectors;
};

// Off-sector coupling, relative to the largest matrix entry, below which the
// exponential is taken block by block. Least-squares amplitudes carry rounding
// noise near 1e-10 in directions the gram spectrum barely resolves; a control
// that really breaks a symmetry leaks at order one.
constexpr double kSectorLeakTol = 1e-8;

// exp(-i H dt) psi, exponentiating only the symmetry sectors psi occupies
// when H does not couple them to the rest of the space.
ComplexVector evolve_in_sectors(const SymmetryBasis& sectors, const HermitianMatrix& h,
                                const ComplexVector& psi, double dt) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  std::array<ComplexVector, kSectorCount> parts;
  for (int s = 0; s < kSectorCount; ++s) {
    if (sectors.sector_dim(s) == 0) continue;
    parts[s] = sectors.gather(s, psi);
    if (parts[s].cwiseAbs().maxCoeff() == 0.0) {
      parts[s].resize(0);
      continue;
    }
    if (sectors.leakage(s, h) > kSectorLeakTol * scale) return evolve_spectral(h, psi, dt);
  }
  ComplexVector out = ComplexVector::Zero(psi.size());
  for (int s = 0; s < kSectorCount; ++s) {
    if (parts[s].size() == 0) continue;
    sectors.scatter_add(s, evolve_spectral(sectors.block(s, h), parts[s], dt), out);
  }
  return out;
}

struct Control {
  RealVector amplitudes;
  double residual = 0.0;
};

Control solve_control(const Context& ctx, const SpectralSnapshot& snap, double rate) {
  const StateVector ground = adiabatic_state(snap, ctx.config.level, nullptr, ctx.config.gap_tol);
  const ComplexVector aux = aux_action(snap, ctx.dh, rate, ctx.config.level, ctx.config.gap_tol);
  const AuxSolution sol = solve(build_system(ctx.basis, ground, aux), ctx.config.cutoff);
  return {sol.amplitudes, sol.residual};
}

HermitianMatrix controlled_hamiltonian(const Context& ctx, double b, const RealVector& h) {
  HermitianMatrix total = build_hamiltonian(ctx.model, b);
  kernels::accumulate_dense(ctx.basis.strings, h, total);
  return total;
}


TrajectoryRecord run_once(const Context& ctx, const StateVector& psi0,
                          std::span<const double> grid, double dt) {
  const auto& cfg = ctx.config;
  TrajectoryRecord rec;
  rec.label = ctx.driving.label();
  rec.dt_used = dt;
  if (ctx.driving.kind == DrivingKind::Ansatz) rec.strings = ctx.basis.strings;

  ComplexVector psi = psi0.amplitudes();
  std::optional<StateVector> tracked;
  double drift = 0.0;

  auto record = [&](double t) {
    const double b = field(ctx.protocol, t);
    const SpectralSnapshot snap = diagonalize(ctx.model, b);
    StateVector target = adiabatic_state(snap, cfg.level, tracked ? &*tracked : nullptr, cfg.gap_tol);
    const double f = std::min(1.0, std::norm(target.amplitudes().dot(psi)));
    rec.times.push_back(t);
    rec.fields.push_back(b);
    rec.fidelity.push_back(f);
    rec.defect_density.push_back(1.0 - f);
    const double rate = field_rate(ctx.protocol, t);
    switch (ctx.driving.kind) {
      case DrivingKind::Bare:
        rec.residual.push_back(aux_action(snap, ctx.dh, rate, cfg.level, cfg.gap_tol).squaredNorm());
        break;
      case DrivingKind::ExactCd:
        rec.residual.push_back(0.0);
        break;
      case DrivingKind::Ansatz: {
        Control c = solve_control(ctx, snap, rate);
        rec.residual.push_back(c.residual);
        if (cfg.record_amplitudes) rec.amplitudes.push_back(std::move(c.amplitudes));
        break;
      }
    }
    tracked = std::move(target);
  };

  record(grid[0]);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t0 = grid[k];
    const double span = grid[k + 1] - t0;
    const auto substeps = std::max<long>(1, static_cast<long>(std::ceil(span / dt - 1e-9)));
    const double h = span / static_cast<double>(substeps);

    std::optional<RealVector> held;
    if (ctx.driving.kind == DrivingKind::Ansatz && !cfg.resolve_aux_every_step) {
      const double tm = t0 + 0.5 * span;
      held = solve_control(ctx, diagonalize(ctx.model, field(ctx.protocol, tm)),
                           field_rate(ctx.protocol, tm))
                 .amplitudes;
    }

    for (long s = 0; s < substeps; ++s) {
      const double tm = t0 + (static_cast<double>(s) + 0.5) * h;
      const double b = field(ctx.protocol, tm);
      const double rate = field_rate(ctx.protocol, tm);
      const SpectralSnapshot snap = diagonalize(ctx.model, b);
      switch (ctx.driving.kind) {
        case DrivingKind::Bare: {
          const ComplexMatrix& v = snap.eigenvectors;
          ComplexVector c = v.adjoint() * psi;
          for (Eigen::Index n = 0; n < c.size(); ++n) {
            c(n) *= std::polar(1.0, -snap.eigenvalues(n) * h);
          }
          psi = v * c;
          break;
        }
        case DrivingKind::ExactCd: {
          const AuxMatrix aux = exact_aux(snap, ctx.dh, rate, cfg.gap_tol);
          psi = evolve_in_sectors(ctx.sectors, build_hamiltonian(ctx.model, b) + aux.matrix, psi, h);
          break;
        }
        case DrivingKind::Ansatz: {
          const RealVector amps = held ? *held : solve_control(ctx, snap, rate).amplitudes;
          psi = evolve_in_sectors(ctx.sectors, controlled_hamiltonian(ctx, b, amps), psi, h);
          break;
        }
      }
      drift = std::max(drift, std::abs(psi.norm() - 1.0));
    }
    record(grid[k + 1]);
  }
  rec.norm_drift = drift;
  if (drift > cfg.norm_tol) {
    throw NumericError("norm drift " + std::to_string(drift) + " exceeds " +
                       std::to_string(cfg.norm_tol));
  }
  return rec;
}

}  // namespace

QuenchProtocol QuenchProtocol::linear(double b0, double v, double bf) {
  QuenchProtocol p;
  p.kind = QuenchKind::Linear;
  p.b0 = b0;
  p.rate = v;
  p.bf = bf;
  return p;
}

QuenchProtocol QuenchProtocol::cubic(double b0, double bf, double tau) {
  QuenchProtocol p;
  p.kind = QuenchKind::Cubic;
  p.b0 = b0;
  p.bf = bf;
  p.tau = tau;
  return p;
}

void QuenchProtocol::validate() const {
  if (!std::isfinite(b0) || !std::isfinite(bf)) throw ConfigError("protocol fields must be finite");
  if (kind == QuenchKind::Linear) {
    if (!std::isfinite(rate) || rate == 0.0) throw ConfigError("linear quench needs a nonzero rate");
    if (!((b0 - bf) / rate >= 0.0)) {
      throw ConfigError("linear quench never reaches its end field at this rate sign");
    }
  } else {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("cubic quench needs tau > 0");
  }
}

double QuenchProtocol::duration() const {
  return kind == QuenchKind::Linear ? (b0 - bf) / rate : tau;
}

double field(const QuenchProtocol& p, double t) {
  t = clamp_to_domain(p, t);
  if (p.kind == QuenchKind::Linear) return p.b0 - p.rate * t;
  const double s = t / p.tau;
  const double d = p.bf - p.b0;
  return p.b0 + 3.0 * d * s * s - 2.0 * d * s * s * s;
}

double field_rate(const QuenchProtocol& p, double t) {
  t = clamp_to_domain(p, t);
  if (p.kind == QuenchKind::Linear) return -p.rate;
  const double s = t / p.tau;
  // d/dt of the cubic: 6 d s (1 - s) / tau, exactly zero at s = 0 and s = 1.
  return 6.0 * (p.bf - p.b0) * s * (1.0 - s) / p.tau;
}

double critical_time(const QuenchProtocol& p, double coupling) {
  p.validate();
  const double target = std::abs(coupling);
  const double lo = std::min(p.b0, p.bf);
  const double hi = std::max(p.b0, p.bf);
  if (!(target >= lo && target <= hi)) {
    throw DomainError("protocol never crosses the critical field B = " + std::to_string(target));
  }
  if (p.kind == QuenchKind::Linear) return (p.b0 - target) / p.rate;

  // B(s) is monotone on [0, 1]; bisect on the sign of B(s) - target.
  double a = 0.0;
  double b = 1.0;
  const double sign_a = p.b0 - target;
  while (b - a > 1e-12) {
    const double mid = 0.5 * (a + b);
    const double value = field(p, mid * p.tau) - target;
    if (value == 0.0) return mid * p.tau;
    if ((value > 0.0) == (sign_a > 0.0)) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b) * p.tau;
}

std::string Driving::label() const {
  switch (kind) {
    case DrivingKind::Bare: return "bare";
    case DrivingKind::ExactCd: return "exact";
    case DrivingKind::Ansatz: return ansatz.display_label();
  }
  return "?";
}

void PropagationConfig::validate() const {
  if (!(dt >= 0.0)) throw ConfigError("dt must be non-negative");
  if (dt == 0.0 && !(dt_fraction > 0.0)) throw ConfigError("dt_fraction must be positive");
  if (max_refinements < 0) throw ConfigError("max_refinements must be non-negative");
  if (!(convergence_tol > 0.0)) throw ConfigError("convergence_tol must be positive");
  if (!(norm_tol > 0.0)) throw ConfigError("norm_tol must be positive");
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw ConfigError("cutoff must lie in (0, 1)");
  if (level < 0) throw ConfigError("level must be non-negative");
}

double TrajectoryRecord::max_residual() const {
  double out = 0.0;
  for (double r : residual) out = std::max(out, r);
  return out;
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw ConfigError("fidelity of states with different dimensions");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

std::vector<double> uniform_grid(double t0, double t1, int points) {
  if (points < 2) throw ConfigError("a time grid needs at least two points");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    out[static_cast<std::size_t>(k)] = t0 + (t1 - t0) * static_cast<double>(k) / (points - 1);
  }
  out.back() = t1;
  return out;
}

ComplexVector evolve_spectral(const HermitianMatrix& h, const ComplexVector& psi, double dt) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const ComplexMatrix& v = es.eigenvectors();
  ComplexVector c = v.adjoint() * psi;
  for (Eigen::Index n = 0; n < c.size(); ++n) c(n) *= std::polar(1.0, -es.eigenvalues()(n) * dt);
  return v * c;
}

TrajectoryRecord propagate(const IsingModel& model, const QuenchProtocol& protocol,
                           const Driving& driving, const StateVector& psi0,
                           const PropagationConfig& config, std::span<const double> t_grid) {
  model.validate();
  protocol.validate();
  config.validate();
  if (psi0.n_sites() != model.n_sites) throw ConfigError("initial state does not match the model");
  if (t_grid.size() < 2) throw ConfigError("time grid needs at least two points");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw ConfigError("time grid must be strictly increasing");
  }
  clamp_to_domain(protocol, t_grid.front());
  clamp_to_domain(protocol, t_grid.back());

  Context ctx{model, protocol, driving, config, field_derivative(model), {},
              SymmetryBasis(model.n_sites)};
  if (driving.kind == DrivingKind::Ansatz) ctx.basis = enumerate_basis(driving.ansatz, model.n_sites);

  double dt = config.dt > 0.0 ? config.dt : config.dt_fraction * protocol.duration();
  if (!(dt > 0.0)) throw ConfigError("integrator step must be positive");

  TrajectoryRecord coarse = run_once(ctx, psi0, t_grid, dt);
  if (!config.check_convergence) {
    coarse.convergence_delta = std::numeric_limits<double>::quiet_NaN();
    return coarse;
  }
  for (int r = 1; r <= config.max_refinements; ++r) {
    dt *= 0.5;
    TrajectoryRecord fine = run_once(ctx, psi0, t_grid, dt);
    const double delta = std::abs(fine.final_fidelity() - coarse.final_fidelity());
    fine.refinements = r;
    fine.convergence_delta = delta;
    if (delta <= config.convergence_tol) return fine;
    coarse = std::move(fine);
  }
  throw ConvergenceError("final fidelity still moves by " +
                         std::to_string(coarse.convergence_delta) + " after " +
                         std::to_string(config.max_refinements) + " step halvings");
}

}  // namespace cdforge
