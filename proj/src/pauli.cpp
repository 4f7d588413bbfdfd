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

#include "cdforge/pauli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "cdforge/errors.hpp"
#include "cdforge/kernels.hpp"

namespace cdforge {

char to_char(Pauli p) {
  switch (p) {
    case Pauli::X: return 'x';
    case Pauli::Y: return 'y';
    case Pauli::Z: return 'z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'x': return Pauli::X;
    case 'y': return Pauli::Y;
    case 'z': return Pauli::Z;
    default: break;
  }
  throw ConfigError(std::string("unknown Pauli component '") + c + "'");
}

PauliString::PauliString(std::vector<SiteOp> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw ConfigError("Pauli string needs at least one non-identity factor");
  std::sort(ops_.begin(), ops_.end());
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    const auto& f = ops_[k];
    if (f.site < 1 || f.site > kMaxStateSites) {
      throw ConfigError("Pauli string site " + std::to_string(f.site) + " out of range");
    }
    if (k > 0 && ops_[k - 1].site == f.site) {
      throw ConfigError("Pauli string repeats site " + std::to_string(f.site));
    }
    const std::uint64_t bit = std::uint64_t{1} << (f.site - 1);
    if (f.op != Pauli::Z) flip_mask_ |= bit;
    if (f.op != Pauli::X) sign_mask_ |= bit;
    if (f.op == Pauli::Y) ++y_count_;
  }
}

PauliString PauliString::parse(const std::string& text) {
  std::istringstream in(text);
  std::vector<SiteOp> ops;
  std::string token;
  while (in >> token) {
    if (token.size() < 2) throw ConfigError("bad Pauli factor '" + token + "'");
    const Pauli op = pauli_from_char(token[0]);
    int site = 0;
    try {
      std::size_t used = 0;
      site = std::stoi(token.substr(1), &used);
      if (used + 1 != token.size()) throw ConfigError("bad Pauli factor '" + token + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad Pauli factor '" + token + "'");
    }
    ops.push_back({site, op});
  }
  return PauliString(std::move(ops));
}

std::string PauliString::to_string() const {
  std::string out;
  for (const auto& f : ops_) {
    if (!out.empty()) out += ' ';
    out += to_char(f.op);
    out += std::to_string(f.site);
  }
  return out;
}

std::strong_ordering operator<=>(const PauliString& a, const PauliString& b) {
  if (auto c = a.ops_.size() <=> b.ops_.size(); c != 0) return c;
  for (std::size_t k = 0; k < a.ops_.size(); ++k) {
    if (auto c = a.ops_[k].site <=> b.ops_[k].site; c != 0) return c;
  }
  for (std::size_t k = 0; k < a.ops_.size(); ++k) {
    if (auto c = a.ops_[k].op <=> b.ops_[k].op; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

StateVector::StateVector(int n_sites, ComplexVector amplitudes, double norm_tol)
    : n_sites_(n_sites), amplitudes_(std::move(amplitudes)) {
  if (n_sites < 1 || n_sites > kMaxStateSites) {
    throw ConfigError("state vector site count " + std::to_string(n_sites) + " out of range");
  }
  if (amplitudes_.size() != (Eigen::Index{1} << n_sites)) {
    throw ContractError("state vector length does not match 2^" + std::to_string(n_sites));
  }
  const double norm = amplitudes_.norm();
  if (!(std::abs(norm - 1.0) <= norm_tol)) {
    throw ContractError("state vector is not normalized (norm " + std::to_string(norm) + ")");
  }
}

StateVector StateVector::basis_state(int n_sites, std::uint64_t index) {
  if (n_sites < 1 || n_sites > kMaxStateSites) throw ConfigError("site count out of range");
  ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << n_sites);
  if (index >= static_cast<std::uint64_t>(v.size())) throw ConfigError("basis index out of range");
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(n_sites, std::move(v));
}

void check_sites(const PauliString& p, int n_sites) {
  if (p.max_site() > n_sites) {
    throw ConfigError("Pauli string " + p.to_string() + " acts beyond " +
                      std::to_string(n_sites) + " sites");
  }
}

ComplexVector apply(const PauliString& p, const ComplexVector& psi, int n_sites) {
  check_sites(p, n_sites);
  if (psi.size() != (Eigen::Index{1} << n_sites)) {
    throw ConfigError("vector length does not match 2^" + std::to_string(n_sites));
  }
  ComplexVector out(psi.size());
  kernels::apply_pauli(p, {psi.data(), static_cast<std::size_t>(psi.size())},
                       {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

StateVector apply(const PauliString& p, const StateVector& psi) {
  return StateVector(psi.n_sites(), apply(p, psi.amplitudes(), psi.n_sites()));
}

ComplexMatrix to_dense(const PauliString& p, int n_sites, int max_sites) {
  check_sites(p, n_sites);
  if (n_sites > max_sites) {
    throw ResourceError("dense operator for " + std::to_string(n_sites) +
                        " sites exceeds the cap of " + std::to_string(max_sites));
  }
  const Complex i{0.0, 1.0};
  ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  sy << 0.0, -i, i, 0.0;
  sz << 1.0, 0.0, 0.0, -1.0;
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);

  auto factor = [&](int site) -> const ComplexMatrix& {
    for (const auto& f : p.ops()) {
      if (f.site == site) return f.op == Pauli::X ? sx : (f.op == Pauli::Y ? sy : sz);
    }
    return id;
  };
  // Highest site is the most significant factor.
  ComplexMatrix out = factor(n_sites);
  for (int site = n_sites - 1; site >= 1; --site) {
    out = Eigen::kroneckerProduct(out, factor(site)).eval();
  }
  return out;
}

double real_pair_overlap(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) throw ConfigError("overlap of vectors with different lengths");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    acc += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  }
  return 2.0 * acc;
}

}  // namespace cdforge
