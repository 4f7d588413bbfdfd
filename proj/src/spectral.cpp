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

#include "cdforge/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "cdforge/errors.hpp"
#include "cdforge/symmetry.hpp"

namespace cdforge {
namespace {

double zz_energy(std::uint64_t b, const IsingModel& model) {
  double e = 0.0;
  for (int j = 0; j + 1 < model.n_sites; ++j) {
    const bool a = (b >> j) & 1u;
    const bool c = (b >> (j + 1)) & 1u;
    e += (a == c) ? model.coupling : -model.coupling;
  }
  return e;
}

void check_dense_size(int n_sites, int max_sites) {
  if (n_sites > max_sites) {
    throw ResourceError("dense operator for " + std::to_string(n_sites) +
                        " sites exceeds the cap of " + std::to_string(max_sites));
  }
}

// Largest-magnitude amplitude becomes real positive. Ties within a relative
// 1e-12 resolve to the lowest index so the choice is reproducible.
template <typename Vec>
void fix_phase(Vec&& v) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) best = std::max(best, std::abs(v[k]));
  if (best == 0.0) return;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) >= best * (1.0 - 1e-12)) {
      const auto phase = std::conj(Complex(v[k])) / std::abs(v[k]);
      v *= phase;
      return;
    }
  }
}

template <typename Vec>
void fix_sign(Vec&& v) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) best = std::max(best, std::abs(v[k]));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) >= best * (1.0 - 1e-12)) {
      if (v[k] < 0.0) v = -v;
      return;
    }
  }
}

double resolve_gap_tol(const SpectralSnapshot& s, std::optional<double> gap_tol) {
  const double tol = gap_tol.value_or(s.default_gap_tol());
  if (!(tol >= 0.0)) throw ConfigError("gap tolerance must be non-negative");
  return tol;
}

void check_pair(const SpectralSnapshot& s, Eigen::Index m, Eigen::Index n, double tol) {
  const double gap = std::abs(s.eigenvalues(n) - s.eigenvalues(m));
  if (gap <= tol) {
    throw DegeneracyError("levels " + std::to_string(std::min(m, n)) + " and " +
                              std::to_string(std::max(m, n)) + " are degenerate within " +
                              std::to_string(tol) + " (gap " + std::to_string(gap) +
                              ") at B = " + std::to_string(s.field),
                          static_cast<int>(std::min(m, n)), static_cast<int>(std::max(m, n)),
                          gap);
  }
}

}  // namespace

void IsingModel::validate() const {
  if (n_sites < 1 || n_sites > kMaxStateSites) {
    throw ConfigError("n_sites must lie in [1, " + std::to_string(kMaxStateSites) + "]");
  }
  if (!std::isfinite(coupling) || (n_sites >= 2 && coupling == 0.0)) {
    throw ConfigError("coupling must be finite and nonzero");
  }
}

HermitianMatrix build_hamiltonian(const IsingModel& model, double field, int max_sites) {
  model.validate();
  check_dense_size(model.n_sites, max_sites);
  const Eigen::Index dim = Eigen::Index{1} << model.n_sites;
  HermitianMatrix h = HermitianMatrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    h(b, b) = zz_energy(ub, model);
    for (int j = 0; j < model.n_sites; ++j) {
      h(static_cast<Eigen::Index>(ub ^ (std::uint64_t{1} << j)), b) = -field;
    }
  }
  return h;
}

HermitianMatrix field_derivative(const IsingModel& model, int max_sites) {
  model.validate();
  check_dense_size(model.n_sites, max_sites);
  const Eigen::Index dim = Eigen::Index{1} << model.n_sites;
  HermitianMatrix d = HermitianMatrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    for (int j = 0; j < model.n_sites; ++j) {
      d(static_cast<Eigen::Index>(static_cast<std::uint64_t>(b) ^ (std::uint64_t{1} << j)), b) =
          -1.0;
    }
  }
  return d;
}

double SpectralSnapshot::default_gap_tol() const { return 1e-8 * spectral_width(); }

SpectralSnapshot diagonalize(const HermitianMatrix& h, double field, double herm_tol) {
  if (h.rows() != h.cols() || h.rows() == 0) throw ContractError("matrix must be square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale) {
    throw ContractError("matrix is not Hermitian within tolerance");
  }
  SpectralSnapshot s;
  s.field = field;
  s.sectors.assign(static_cast<std::size_t>(h.rows()), 0);
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    const RealMatrix re = h.real();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(re);
    s.eigenvalues = es.eigenvalues();
    RealMatrix v = es.eigenvectors();
    for (Eigen::Index k = 0; k < v.cols(); ++k) fix_sign(v.col(k));
    s.eigenvectors = v.cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    s.eigenvalues = es.eigenvalues();
    s.eigenvectors = es.eigenvectors();
    for (Eigen::Index k = 0; k < s.eigenvectors.cols(); ++k) fix_phase(s.eigenvectors.col(k));
  }
  return s;
}

SpectralSnapshot diagonalize(const IsingModel& model, double field) {
  model.validate();
  check_dense_size(model.n_sites, kDefaultMaxDenseSites);
  const SymmetryBasis basis(model.n_sites);
  const Eigen::Index dim = basis.full_dim();

  struct Level {
    double energy;
    int sector;
    Eigen::Index column;
  };
  std::vector<Level> levels;
  levels.reserve(static_cast<std::size_t>(dim));
  std::array<RealMatrix, kSectorCount> vectors;

  for (int s = 0; s < kSectorCount; ++s) {
    const Eigen::Index d = basis.sector_dim(s);
    if (d == 0) continue;
    RealMatrix block = RealMatrix::Zero(d, d);
    for (Eigen::Index col = 0; col < d; ++col) {
      for (const auto& e : basis.vector(s, col)) {
        const auto add = [&](std::uint64_t state, double value) {
          const Eigen::Index row = basis.column_of(s, state);
          if (row >= 0) block(row, col) += basis.coeff_of(s, state) * value;
        };
        add(e.state, e.coeff * zz_energy(e.state, model));
        for (int j = 0; j < model.n_sites; ++j) add(e.state ^ (std::uint64_t{1} << j), -field * e.coeff);
      }
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(block);
    vectors[s] = basis.embed(s, es.eigenvectors());
    for (Eigen::Index k = 0; k < d; ++k) levels.push_back({es.eigenvalues()(k), s, k});
  }

  std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
    return a.energy != b.energy ? a.energy < b.energy : a.sector < b.sector;
  });
  const double tie = 1e-12 * std::max(1.0, levels.back().energy - levels.front().energy);
  for (std::size_t begin = 0; begin < levels.size();) {
    std::size_t end = begin + 1;
    while (end < levels.size() && levels[end].energy - levels[end - 1].energy <= tie) ++end;
    std::stable_sort(levels.begin() + begin, levels.begin() + end,
                     [](const Level& a, const Level& b) { return a.sector < b.sector; });
    begin = end;
  }

  SpectralSnapshot out;
  out.field = field;
  out.symmetry_resolved = true;
  out.eigenvalues.resize(dim);
  out.eigenvectors.resize(dim, dim);
  out.sectors.resize(static_cast<std::size_t>(dim));
  for (Eigen::Index k = 0; k < dim; ++k) {
    const auto& lv = levels[static_cast<std::size_t>(k)];
    RealVector v = vectors[lv.sector].col(lv.column);
    fix_sign(v);
    out.eigenvalues(k) = lv.energy;
    out.eigenvectors.col(k) = v.cast<Complex>();
    out.sectors[static_cast<std::size_t>(k)] = lv.sector;
  }
  return out;
}

AuxMatrix exact_aux(const SpectralSnapshot& snapshot, const HermitianMatrix& dh_dlambda,
                    double field_rate, std::optional<double> gap_tol) {
  const Eigen::Index dim = snapshot.size();
  if (dh_dlambda.rows() != dim || dh_dlambda.cols() != dim) {
    throw ConfigError("derivative operator does not match the snapshot dimension");
  }
  AuxMatrix aux{HermitianMatrix::Zero(dim, dim), field_rate};
  if (field_rate == 0.0) return aux;
  const double tol = resolve_gap_tol(snapshot, gap_tol);

  const ComplexMatrix& v = snapshot.eigenvectors;
  const ComplexMatrix w = v.adjoint() * dh_dlambda * v;
  ComplexMatrix k = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index n = 0; n < dim; ++n) {
    for (Eigen::Index m = 0; m < dim; ++m) {
      if (m == n || !snapshot.coupled(m, n)) continue;
      if (m < n) check_pair(snapshot, m, n, tol);
      k(m, n) = w(m, n) / (snapshot.eigenvalues(n) - snapshot.eigenvalues(m));
    }
  }
  const ComplexMatrix raw = Complex(0.0, field_rate) * (v * k * v.adjoint());
  aux.matrix = 0.5 * (raw + raw.adjoint());
  return aux;
}

ComplexVector aux_action(const SpectralSnapshot& snapshot, const HermitianMatrix& dh_dlambda,
                         double field_rate, Eigen::Index level, std::optional<double> gap_tol) {
  const Eigen::Index dim = snapshot.size();
  if (level < 0 || level >= dim) throw ConfigError("level index out of range");
  if (dh_dlambda.rows() != dim || dh_dlambda.cols() != dim) {
    throw ConfigError("derivative operator does not match the snapshot dimension");
  }
  ComplexVector out = ComplexVector::Zero(dim);
  if (field_rate == 0.0) return out;
  const double tol = resolve_gap_tol(snapshot, gap_tol);

  const ComplexMatrix& v = snapshot.eigenvectors;
  const ComplexVector w = v.adjoint() * (dh_dlambda * v.col(level));
  ComplexVector coeffs = ComplexVector::Zero(dim);
  for (Eigen::Index m = 0; m < dim; ++m) {
    if (m == level || !snapshot.coupled(m, level)) continue;
    check_pair(snapshot, m, level, tol);
    coeffs(m) = w(m) / (snapshot.eigenvalues(level) - snapshot.eigenvalues(m));
  }
  out = Complex(0.0, field_rate) * (v * coeffs);
  return out;
}

StateVector adiabatic_state(const SpectralSnapshot& snapshot, Eigen::Index level,
                            const StateVector* prev, std::optional<double> gap_tol,
                            double overlap_floor) {
  const Eigen::Index dim = snapshot.size();
  if (level < 0 || level >= dim) throw ConfigError("level index out of range");
  const double tol = resolve_gap_tol(snapshot, gap_tol);
  for (Eigen::Index m = 0; m < dim; ++m) {
    if (m != level && snapshot.coupled(m, level)) check_pair(snapshot, m, level, tol);
  }
  const int n_sites = std::countr_zero(static_cast<std::uint64_t>(dim));
  ComplexVector v = snapshot.eigenvectors.col(level);
  v /= v.norm();
  if (prev != nullptr) {
    if (prev->dim() != dim) throw ConfigError("previous state has the wrong dimension");
    const Complex overlap = prev->amplitudes().dot(v);
    if (std::abs(overlap) < overlap_floor) {
      throw TrackingError("adiabatic state lost overlap with its predecessor at B = " +
                          std::to_string(snapshot.field) + " (|<prev|next>| = " +
                          std::to_string(std::abs(overlap)) + ")");
    }
    v *= std::conj(overlap) / std::abs(overlap);
  } else {
    fix_phase(v);
  }
  return StateVector(n_sites, std::move(v));
}

StateVector adiabatic_state(const IsingModel& model, const FieldPath& field_path, double t,
                            Eigen::Index level, const StateVector* prev,
                            std::optional<double> gap_tol) {
  return adiabatic_state(diagonalize(model, field_path(t)), level, prev, gap_tol);
}

}  // namespace cdforge
