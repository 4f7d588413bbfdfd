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

#include <array>
#include <cstdint>
#include <vector>

#include "cdforge/pauli.hpp"

namespace cdforge {

/// Irreducible sectors of the open chain's symmetry group {1, F, R, FR}, where
/// F = prod_j sigma^x_j is the global spin flip and R the site reflection
/// j -> N + 1 - j. Index = 2 * [flip odd] + [reflection odd]; sector 0 holds
/// the ground state for every field B > 0.
inline constexpr int kSectorCount = 4;

int sector_flip_sign(int sector);
int sector_reflection_sign(int sector);

/// Reverses the N-bit basis index (site reflection).
std::uint64_t reflect_index(std::uint64_t b, int n_sites);

/// Symmetry-adapted orthonormal basis. Every vector is a combination of at
/// most four computational states with coefficients of equal magnitude.
class SymmetryBasis {
 public:
  explicit SymmetryBasis(int n_sites);

  int n_sites() const { return n_sites_; }
  Eigen::Index full_dim() const { return Eigen::Index{1} << n_sites_; }
  Eigen::Index sector_dim(int sector) const {
    return static_cast<Eigen::Index>(offsets_[sector].size()) - 1;
  }

  /// Column `col` of sector `sector` as (state, coefficient) pairs.
  struct Entry {
    std::uint64_t state;
    double coeff;
  };
  std::span<const Entry> vector(int sector, Eigen::Index col) const;

  /// Coefficient of computational state b in its sector column, or -1 column
  /// when the state has no component in this sector.
  Eigen::Index column_of(int sector, std::uint64_t b) const { return column_[sector][b]; }
  double coeff_of(int sector, std::uint64_t b) const { return coeff_[sector][b]; }

  /// Maps sector coordinates (d x k) to the full space (2^N x k).
  RealMatrix embed(int sector, const RealMatrix& coords) const;

  /// Start of `sector` when all sector coordinates are concatenated in
  /// sector order.
  Eigen::Index sector_offset(int sector) const { return sector_start_[sector]; }
  /// S^T v: coordinates of v in the symmetry-adapted basis, sectors concatenated.
  ComplexVector to_coords(const ComplexVector& v) const;
  /// Coordinates of v restricted to one sector.
  ComplexVector gather(int sector, const ComplexVector& v) const;
  /// Adds S_sector c into v.
  void scatter_add(int sector, const ComplexVector& c, ComplexVector& v) const;

  /// S_s^T H S_s for a dense operator on the full space.
  ComplexMatrix block(int sector, const ComplexMatrix& h) const;
  /// Largest norm of the part of H u that leaves the sector, over the
  /// sector's basis vectors u.
  double leakage(int sector, const ComplexMatrix& h) const;

 private:
  int n_sites_;
  std::array<std::vector<Entry>, kSectorCount> entries_;
  std::array<std::vector<std::size_t>, kSectorCount> offsets_;
  std::array<std::vector<Eigen::Index>, kSectorCount> column_;
  std::array<std::vector<double>, kSectorCount> coeff_;
  std::array<Eigen::Index, kSectorCount> sector_start_{};
};

}  // namespace cdforge
