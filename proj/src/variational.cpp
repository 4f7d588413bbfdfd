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

#include "cdforge/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cdforge/errors.hpp"
#include "cdforge/kernels.hpp"
#include "cdforge/symmetry.hpp"

namespace cdforge {
namespace {

void sites_recursive(int n_sites, int range, int body, std::vector<int>& cur,
                     const std::function<void(const std::vector<int>&)>& emit) {
  if (static_cast<int>(cur.size()) == body) {
    emit(cur);
    return;
  }
  for (int s = 1; s <= n_sites; ++s) {
    bool ok = true;
    for (int t : cur) {
      const int d = std::abs(s - t);
      if (d == 0 || d > range) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    cur.push_back(s);
    sites_recursive(n_sites, range, body, cur, emit);
    cur.pop_back();
  }
}

struct UnionFind {
  std::vector<Eigen::Index> parent;
  explicit UnionFind(Eigen::Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  }
  Eigen::Index find(Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(Eigen::Index a, Eigen::Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

void check_basis_state(const OperatorBasis& basis, Eigen::Index dim) {
  if ((Eigen::Index{1} << basis.n_sites) != dim) {
    throw ConfigError("basis was enumerated for " + std::to_string(basis.n_sites) +
                      " sites but the state has dimension " + std::to_string(dim));
  }
}

RealVector realify(const ComplexVector& v) {
  RealVector out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

}  // namespace

void AnsatzSpec::validate(int n_sites) const {
  if (max_body < 1) throw ConfigError("ansatz max_body must be >= 1");
  if (max_body > n_sites) {
    throw ConfigError("ansatz max_body " + std::to_string(max_body) + " exceeds the chain length " +
                      std::to_string(n_sites));
  }
  if (range < max_body - 1 || range > n_sites - 1) {
    throw ConfigError("ansatz range " + std::to_string(range) + " outside [" +
                      std::to_string(max_body - 1) + ", " + std::to_string(n_sites - 1) + "]");
  }
  if (mode == AnsatzMode::Patterns) {
    if (patterns.empty()) throw ConfigError("patterns mode needs at least one pattern");
    for (const auto& p : patterns) {
      if (static_cast<int>(p.size()) != max_body) {
        throw ConfigError("every pattern must have max_body components");
      }
    }
  }
}

std::string AnsatzSpec::display_label() const {
  if (!label.empty()) return label;
  std::string out;
  if (mode == AnsatzMode::CanonicalFull) {
    out = "full" + std::to_string(max_body);
  } else {
    out = std::to_string(max_body);
    for (std::size_t k = 0; k < patterns.size(); ++k) {
      out += k == 0 ? "" : "+";
      for (Pauli c : patterns[k]) out += to_char(c);
    }
  }
  return out + "_R" + std::to_string(range);
}

AnsatzSpec AnsatzSpec::two_body_yz(int n_sites) {
  AnsatzSpec s;
  s.mode = AnsatzMode::Patterns;
  s.max_body = 2;
  s.range = n_sites - 1;
  s.patterns = {{Pauli::Y, Pauli::Z}};
  return s;
}

AnsatzSpec AnsatzSpec::canonical(int max_body, int range) {
  AnsatzSpec s;
  s.mode = AnsatzMode::CanonicalFull;
  s.max_body = max_body;
  s.range = range;
  return s;
}

OperatorBasis enumerate_basis(const AnsatzSpec& spec, int n_sites) {
  if (n_sites < 1 || n_sites > kMaxStateSites) throw ConfigError("site count out of range");
  spec.validate(n_sites);
  std::set<PauliString> unique;
  std::vector<int> cur;
  if (spec.mode == AnsatzMode::Patterns) {
    for (const auto& pattern : spec.patterns) {
      sites_recursive(n_sites, spec.range, spec.max_body, cur, [&](const std::vector<int>& sites) {
        std::vector<SiteOp> ops;
        for (std::size_t l = 0; l < sites.size(); ++l) ops.push_back({sites[l], pattern[l]});
        unique.insert(PauliString(std::move(ops)));
      });
    }
  } else {
    for (int k = 1; k <= spec.max_body; ++k) {
      sites_recursive(n_sites, spec.range, k, cur, [&](const std::vector<int>& sites) {
        if (!std::is_sorted(sites.begin(), sites.end())) return;
        int combos = 1;
        for (int l = 0; l < k; ++l) combos *= 3;
        for (int c = 0; c < combos; ++c) {
          std::vector<SiteOp> ops;
          int code = c;
          for (int l = k - 1; l >= 0; --l) {
            ops.push_back({sites[static_cast<std::size_t>(l)], static_cast<Pauli>(code % 3)});
            code /= 3;
          }
          unique.insert(PauliString(std::move(ops)));
        }
      });
    }
  }
  OperatorBasis basis;
  basis.strings.assign(unique.begin(), unique.end());
  basis.spec = spec;
  basis.n_sites = n_sites;
  return basis;
}

NormalSystem build_system(const OperatorBasis& basis, const StateVector& psi,
                          const ComplexVector& aux_image) {
  check_basis_state(basis, psi.dim());
  if (aux_image.size() != psi.dim()) throw ConfigError("auxiliary image has the wrong dimension");
  // Images are stored in symmetry-adapted coordinates: inner products are
  // unchanged, and strings that map a symmetric state into different sectors
  // get exactly disjoint row supports.
  const SymmetryBasis coords(basis.n_sites);
  NormalSystem sys;
  sys.state_ref = psi.amplitudes();
  sys.images = kernels::realified_images(basis.strings, psi.amplitudes(), &coords);
  sys.aux_image = realify(coords.to_coords(aux_image));
  sys.gram = kernels::gram(sys.images);
  sys.target = 2.0 * (sys.images.transpose() * sys.aux_image);
  sys.aux_norm_sq = sys.aux_image.squaredNorm();
  return sys;
}

NormalSystem build_system(const OperatorBasis& basis, const StateVector& psi, const AuxMatrix& aux) {
  if (aux.matrix.rows() != psi.dim() || aux.matrix.cols() != psi.dim()) {
    throw ConfigError("auxiliary matrix has the wrong dimension");
  }
  return build_system(basis, psi, ComplexVector(aux.matrix * psi.amplitudes()));
}

NormalSystem oracle_system(const OperatorBasis& basis, const DensityMatrix& rho,
                           const AuxMatrix& aux) {
  check_basis_state(basis, rho.rows());
  if (rho.rows() != rho.cols() || aux.matrix.rows() != rho.rows()) {
    throw ConfigError("density matrix and auxiliary matrix dimensions differ");
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ContractError("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-10) {
    throw ContractError("density matrix does not have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw ContractError("density matrix is not positive semidefinite");
  }

  const auto m = basis.size();
  std::vector<ComplexMatrix> dense;
  dense.reserve(static_cast<std::size_t>(m));
  for (const auto& p : basis.strings) dense.push_back(to_dense(p, basis.n_sites));

  NormalSystem sys;
  sys.gram.resize(m, m);
  sys.target.resize(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const ComplexMatrix anti = dense[a] * dense[b] + dense[b] * dense[a];
      sys.gram(a, b) = (rho * anti).trace().real();
    }
    const ComplexMatrix anti = aux.matrix * dense[a] + dense[a] * aux.matrix;
    sys.target(a) = (rho * anti).trace().real();
  }
  sys.aux_norm_sq = (rho * aux.matrix.adjoint() * aux.matrix).trace().real();
  return sys;
}

AuxSolution solve(const NormalSystem& system, double cutoff) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw ConfigError("solver cutoff must lie in (0, 1)");
  const Eigen::Index m = system.gram.rows();
  if (system.gram.cols() != m || system.target.size() != m) {
    throw ConfigError("normal system has inconsistent dimensions");
  }
  AuxSolution sol;
  sol.cutoff = cutoff;
  sol.amplitudes = RealVector::Zero(m);

  // Exact zeros in the gram matrix split the problem into independent blocks.
  UnionFind uf(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (system.gram(i, j) != 0.0) uf.unite(i, j);
    }
  }
  std::vector<std::vector<Eigen::Index>> blocks;
  {
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(m), -1);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index root = uf.find(i);
      if (slot[root] < 0) {
        slot[root] = static_cast<Eigen::Index>(blocks.size());
        blocks.emplace_back();
      }
      blocks[static_cast<std::size_t>(slot[root])].push_back(i);
    }
  }

  struct Decomposed {
    RealVector values;   // nonzero part of the block spectrum, ascending
    RealMatrix vectors;  // empty when the block target vanishes
    bool dual = false;   // vectors live in row space rather than amplitude space
    std::vector<Eigen::Index> rows;
  };
  std::vector<Decomposed> parts(blocks.size());
  double largest = 0.0;
  std::vector<double> spectrum;
  spectrum.reserve(static_cast<std::size_t>(m));
  const bool have_images = system.images.size() != 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& idx = blocks[b];
    const auto d = static_cast<Eigen::Index>(idx.size());
    bool active = false;
    for (Eigen::Index i : idx) active = active || system.target(i) != 0.0;
    const auto mode = active ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    auto& part = parts[b];

    if (have_images) {
      for (Eigen::Index r = 0; r < system.images.rows(); ++r) {
        for (Eigen::Index i : idx) {
          if (system.images(r, i) != 0.0) {
            part.rows.push_back(r);
            break;
          }
        }
      }
    }
    const auto r = static_cast<Eigen::Index>(part.rows.size());
    if (have_images && r < d) {
      // 2 M M^T shares the nonzero spectrum of the block gram 2 M^T M.
      RealMatrix mb(r, d);
      for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) mb(i, j) = system.images(part.rows[i], idx[j]);
      }
      RealMatrix k = RealMatrix::Zero(r, r);
      k.selfadjointView<Eigen::Lower>().rankUpdate(mb, 2.0);
      k.triangularView<Eigen::StrictlyUpper>() = k.transpose();
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(k, mode);
      part.values = es.eigenvalues();
      if (active) part.vectors = es.eigenvectors();
      part.dual = true;
      for (Eigen::Index z = r; z < d; ++z) spectrum.push_back(0.0);
    } else {
      RealMatrix g(d, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = system.gram(idx[i], idx[j]);
      }
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(g, mode);
      part.values = es.eigenvalues();
      if (active) part.vectors = es.eigenvectors();
    }
    if (part.values.size() > 0) largest = std::max(largest, part.values.maxCoeff());
    for (Eigen::Index k = 0; k < part.values.size(); ++k) spectrum.push_back(part.values(k));
  }
  std::sort(spectrum.begin(), spectrum.end());
  sol.gram_spectrum = Eigen::Map<const RealVector>(spectrum.data(), m);

  const double threshold = cutoff * largest;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& idx = blocks[b];
    const auto& part = parts[b];
    for (Eigen::Index k = 0; k < part.values.size(); ++k) {
      if (part.values(k) > threshold && largest > 0.0) ++sol.rank;
    }
    if (part.vectors.size() == 0 || !(largest > 0.0)) continue;
    const auto d = static_cast<Eigen::Index>(idx.size());
    RealVector h = RealVector::Zero(d);
    if (part.dual) {
      // h = M^+ f = sum_k (2 / lambda_k) M^T w_k (w_k . f)
      const auto r = static_cast<Eigen::Index>(part.rows.size());
      RealMatrix mb(r, d);
      RealVector f(r);
      for (Eigen::Index i = 0; i < r; ++i) {
        f(i) = system.aux_image(part.rows[i]);
        for (Eigen::Index j = 0; j < d; ++j) mb(i, j) = system.images(part.rows[i], idx[j]);
      }
      RealVector w = RealVector::Zero(r);
      for (Eigen::Index k = 0; k < part.values.size(); ++k) {
        if (part.values(k) <= threshold) continue;
        w += part.vectors.col(k) * (2.0 * part.vectors.col(k).dot(f) / part.values(k));
      }
      h = mb.transpose() * w;
    } else {
      RealVector c(d);
      for (Eigen::Index i = 0; i < d; ++i) c(i) = system.target(idx[i]);
      for (Eigen::Index k = 0; k < part.values.size(); ++k) {
        if (part.values(k) <= threshold) continue;
        h += part.vectors.col(k) * (part.vectors.col(k).dot(c) / part.values(k));
      }
    }
    for (Eigen::Index i = 0; i < d; ++i) sol.amplitudes(idx[i]) = h(i);
  }
  if (sol.rank == 0 && m > 0 && system.target.cwiseAbs().maxCoeff() != 0.0) {
    throw RankDeficiencyError("gram matrix vanishes below the cutoff but the target does not");
  }

  if (system.images.size() != 0) {
    sol.residual = (system.aux_image - system.images * sol.amplitudes).squaredNorm();
  } else {
    const RealVector& h = sol.amplitudes;
    sol.residual = std::max(
        0.0, system.aux_norm_sq - h.dot(system.target) + 0.5 * h.dot(system.gram * h));
  }
  return sol;
}

double residual(const OperatorBasis& basis, const RealVector& h, const StateVector& psi,
                const ComplexVector& aux_image) {
  check_basis_state(basis, psi.dim());
  if (h.size() != basis.size()) throw ConfigError("amplitudes do not match the basis");
  ComplexVector r = aux_image;
  ComplexVector image(psi.dim());
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    kernels::apply_pauli(basis.strings[static_cast<std::size_t>(k)],
                         {psi.amplitudes().data(), static_cast<std::size_t>(psi.dim())},
                         {image.data(), static_cast<std::size_t>(image.size())});
    r -= h(k) * image;
  }
  return r.squaredNorm();
}

double residual(const OperatorBasis& basis, const RealVector& h, const StateVector& psi,
                const AuxMatrix& aux) {
  return residual(basis, h, psi, ComplexVector(aux.matrix * psi.amplitudes()));
}

std::uint64_t paper_resource_count(int n_sites, int k_body) {
  if (k_body < 1 || k_body > n_sites) throw ConfigError("resource count needs 1 <= K <= N");
  // (1/2) 4^K = 2^(2K - 1)
  if (2 * k_body - 1 >= 64) throw ResourceError("resource count overflows 64 bits");
  std::uint64_t value = std::uint64_t{1} << (2 * k_body - 1);
  for (int j = 0; j < k_body; ++j) {
    if (__builtin_mul_overflow(value, static_cast<std::uint64_t>(n_sites - j), &value)) {
      throw ResourceError("resource count overflows 64 bits");
    }
  }
  return value;
}

}  // namespace cdforge
