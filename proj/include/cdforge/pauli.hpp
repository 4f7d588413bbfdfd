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

#include <complex>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cdforge {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Dense 2^N x 2^N operator. Hermiticity is a caller contract, checked where it matters.
using HermitianMatrix = ComplexMatrix;
using DensityMatrix = ComplexMatrix;

/// Largest chain for which a dense 2^N x 2^N matrix may be built.
inline constexpr int kDefaultMaxDenseSites = 12;
/// Largest chain a state vector may describe (basis index fits comfortably in 64 bits).
inline constexpr int kMaxStateSites = 30;

enum class Pauli : std::uint8_t { X = 0, Y = 1, Z = 2 };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

/// One non-identity factor of a Pauli string. Sites are 1-based.
struct SiteOp {
  int site;
  Pauli op;

  friend auto operator<=>(const SiteOp&, const SiteOp&) = default;
};

// Basis convention: basis index b in [0, 2^N) stores site j in bit (j - 1),
// bit value 0 is the sigma^z = +1 state, and sigma^y|0> = i|1>.
class PauliString {
 public:
  /// Factors may be given in any order; they are stored sorted by site.
  /// Throws ConfigError on an empty list, a site < 1, or a repeated site.
  explicit PauliString(std::vector<SiteOp> ops);

  /// Parses "y1 z3" style text (case-insensitive component letter, 1-based site).
  static PauliString parse(const std::string& text);

  std::span<const SiteOp> ops() const { return ops_; }
  int support_size() const { return static_cast<int>(ops_.size()); }
  int max_site() const { return ops_.back().site; }
  int min_site() const { return ops_.front().site; }
  /// Largest pairwise site distance; 0 for single-site strings.
  int extent() const { return max_site() - min_site(); }

  /// Basis bits flipped by the string (x and y factors).
  std::uint64_t flip_mask() const { return flip_mask_; }
  /// Basis bits whose value contributes a sign (y and z factors).
  std::uint64_t sign_mask() const { return sign_mask_; }
  int y_count() const { return y_count_; }
  /// Number of factors anticommuting with sigma^x (y and z). Even means the
  /// string commutes with the global spin flip.
  int flip_odd_count() const { return __builtin_popcountll(sign_mask_); }

  std::string to_string() const;

  friend bool operator==(const PauliString& a, const PauliString& b) { return a.ops_ == b.ops_; }
  /// Orders by support size, then sites lexicographically, then components.
  friend std::strong_ordering operator<=>(const PauliString& a, const PauliString& b);

 private:
  std::vector<SiteOp> ops_;
  std::uint64_t flip_mask_ = 0;
  std::uint64_t sign_mask_ = 0;
  int y_count_ = 0;
};

/// Normalized pure state of an N-site chain.
class StateVector {
 public:
  /// Throws ContractError when | ||amplitudes|| - 1 | > norm_tol or the
  /// length is not 2^n_sites.
  StateVector(int n_sites, ComplexVector amplitudes, double norm_tol = 1e-9);

  static StateVector basis_state(int n_sites, std::uint64_t index);

  int n_sites() const { return n_sites_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const { return amplitudes_; }

 private:
  int n_sites_;
  ComplexVector amplitudes_;
};

/// (tensor of sigmas) psi in O(2^N) via basis-index bit manipulation.
/// Throws ConfigError when the string acts beyond n_sites.
ComplexVector apply(const PauliString& p, const ComplexVector& psi, int n_sites);
StateVector apply(const PauliString& p, const StateVector& psi);

/// Kronecker product with identities on unlisted sites. Site 1 is the least
/// significant tensor factor, so for N = 2 a string on site 1 alone equals
/// kron(identity, sigma). Throws ResourceError above max_sites.
ComplexMatrix to_dense(const PauliString& p, int n_sites,
                       int max_sites = kDefaultMaxDenseSites);

/// 2 Re<a|b>. Throws ConfigError on a length mismatch.
double real_pair_overlap(const ComplexVector& a, const ComplexVector& b);

/// Checks 1 <= site <= n_sites for every factor.
void check_sites(const PauliString& p, int n_sites);

}  // namespace cdforge
