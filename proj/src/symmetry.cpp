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

#include "cdforge/symmetry.hpp"

#include <algorithm>
#include <cmath>

namespace cdforge {

int sector_flip_sign(int sector) { return (sector & 2) ? -1 : 1; }
int sector_reflection_sign(int sector) { return (sector & 1) ? -1 : 1; }

std::uint64_t reflect_index(std::uint64_t b, int n_sites) {
  std::uint64_t out = 0;
  for (int j = 0; j < n_sites; ++j) {
    if (b & (std::uint64_t{1} << j)) out |= std::uint64_t{1} << (n_sites - 1 - j);
  }
  return out;
}

SymmetryBasis::SymmetryBasis(int n_sites) : n_sites_(n_sites) {
  const auto dim = static_cast<std::uint64_t>(full_dim());
  const std::uint64_t all = dim - 1;
  for (int s = 0; s < kSectorCount; ++s) {
    offsets_[s].push_back(0);
    column_[s].assign(dim, -1);
    coeff_[s].assign(dim, 0.0);
  }
  for (std::uint64_t b = 0; b < dim; ++b) {
    const std::uint64_t r = reflect_index(b, n_sites);
    const std::array<std::uint64_t, 4> images{b, b ^ all, r, r ^ all};
    if (*std::min_element(images.begin(), images.end()) != b) continue;
    for (int s = 0; s < kSectorCount; ++s) {
      const int f = sector_flip_sign(s);
      const int rs = sector_reflection_sign(s);
      const std::array<int, 4> character{1, f, rs, f * rs};
      // Accumulate the projection onto this sector over distinct images.
      std::array<std::uint64_t, 4> states{};
      std::array<int, 4> weights{};
      int count = 0;
      for (int g = 0; g < 4; ++g) {
        int k = 0;
        while (k < count && states[k] != images[g]) ++k;
        if (k == count) {
          states[count] = images[g];
          weights[count] = 0;
          ++count;
        }
        weights[k] += character[g];
      }
      double norm_sq = 0.0;
      for (int k = 0; k < count; ++k) norm_sq += double(weights[k]) * weights[k];
      if (norm_sq == 0.0) continue;
      const double inv = 1.0 / std::sqrt(norm_sq);
      const auto col = static_cast<Eigen::Index>(offsets_[s].size()) - 1;
      for (int k = 0; k < count; ++k) {
        if (weights[k] == 0) continue;
        const double c = weights[k] * inv;
        entries_[s].push_back({states[k], c});
        column_[s][states[k]] = col;
        coeff_[s][states[k]] = c;
      }
      offsets_[s].push_back(entries_[s].size());
    }
  }
  Eigen::Index start = 0;
  for (int s = 0; s < kSectorCount; ++s) {
    sector_start_[s] = start;
    start += sector_dim(s);
  }
}

std::span<const SymmetryBasis::Entry> SymmetryBasis::vector(int sector, Eigen::Index col) const {
  const auto begin = offsets_[sector][static_cast<std::size_t>(col)];
  const auto end = offsets_[sector][static_cast<std::size_t>(col) + 1];
  return {entries_[sector].data() + begin, end - begin};
}

RealMatrix SymmetryBasis::embed(int sector, const RealMatrix& coords) const {
  RealMatrix out = RealMatrix::Zero(full_dim(), coords.cols());
  for (Eigen::Index col = 0; col < sector_dim(sector); ++col) {
    for (const auto& e : vector(sector, col)) {
      out.row(static_cast<Eigen::Index>(e.state)) += e.coeff * coords.row(col);
    }
  }
  return out;
}

ComplexVector SymmetryBasis::gather(int sector, const ComplexVector& v) const {
  ComplexVector out(sector_dim(sector));
  for (Eigen::Index col = 0; col < out.size(); ++col) {
    Complex acc = 0.0;
    for (const auto& e : vector(sector, col)) acc += e.coeff * v[static_cast<Eigen::Index>(e.state)];
    out[col] = acc;
  }
  return out;
}

ComplexVector SymmetryBasis::to_coords(const ComplexVector& v) const {
  ComplexVector out(full_dim());
  for (int s = 0; s < kSectorCount; ++s) out.segment(sector_start_[s], sector_dim(s)) = gather(s, v);
  return out;
}

void SymmetryBasis::scatter_add(int sector, const ComplexVector& c, ComplexVector& v) const {
  for (Eigen::Index col = 0; col < c.size(); ++col) {
    for (const auto& e : vector(sector, col)) v[static_cast<Eigen::Index>(e.state)] += e.coeff * c[col];
  }
}

ComplexMatrix SymmetryBasis::block(int sector, const ComplexMatrix& h) const {
  const Eigen::Index d = sector_dim(sector);
  ComplexMatrix out(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      Complex acc = 0.0;
      for (const auto& ea : vector(sector, a)) {
        for (const auto& eb : vector(sector, b)) {
          acc += ea.coeff * eb.coeff *
                 h(static_cast<Eigen::Index>(ea.state), static_cast<Eigen::Index>(eb.state));
        }
      }
      out(a, b) = acc;
    }
  }
  return out;
}

double SymmetryBasis::leakage(int sector, const ComplexMatrix& h) const {
  const Eigen::Index d = sector_dim(sector);
  double worst = 0.0;
  ComplexVector image(full_dim());
  for (Eigen::Index b = 0; b < d; ++b) {
    image.setZero();
    for (const auto& e : vector(sector, b)) image += e.coeff * h.col(static_cast<Eigen::Index>(e.state));
    ComplexVector inside = ComplexVector::Zero(full_dim());
    scatter_add(sector, gather(sector, image), inside);
    worst = std::max(worst, (image - inside).norm());
  }
  return worst;
}

}  // namespace cdforge
