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

#include "cdforge/kernels.hpp"

#include <algorithm>
#include <bit>
#include <vector>

#include "cdforge/errors.hpp"

namespace cdforge::kernels {
namespace {

// Below this many amplitudes a parallel region costs more than it saves.
constexpr std::int64_t kParallelThreshold = 1 << 12;

Complex y_phase(int y_count) {
  switch (y_count & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

void apply_pauli(const PauliString& p, std::span<const Complex> in, std::span<Complex> out) {
  const auto n = static_cast<std::int64_t>(in.size());
  const std::uint64_t flip = p.flip_mask();
  const std::uint64_t sign = p.sign_mask();
  const Complex base = y_phase(p.y_count());
#pragma omp parallel for if (n >= kParallelThreshold) schedule(static)
  for (std::int64_t b = 0; b < n; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const Complex v = in[b] * base;
    out[ub ^ flip] = (std::popcount(ub & sign) & 1) ? -v : v;
  }
}

RealMatrix gram(const RealMatrix& columns) {
  const auto m = static_cast<std::int64_t>(columns.cols());
  const Eigen::Index rows = columns.rows();
  std::vector<Eigen::Index> lo(static_cast<std::size_t>(m)), hi(static_cast<std::size_t>(m));
  for (std::int64_t k = 0; k < m; ++k) {
    Eigen::Index a = 0;
    while (a < rows && columns(a, k) == 0.0) ++a;
    Eigen::Index b = rows;
    while (b > a && columns(b - 1, k) == 0.0) --b;
    lo[k] = a;
    hi[k] = b;
  }
  RealMatrix g(m, m);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::int64_t j = i; j < m; ++j) {
      const Eigen::Index a = std::max(lo[i], lo[j]);
      const Eigen::Index b = std::min(hi[i], hi[j]);
      g(i, j) = a < b ? 2.0 * columns.col(i).segment(a, b - a).dot(columns.col(j).segment(a, b - a))
                      : 0.0;
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

RealMatrix realified_images(std::span<const PauliString> strings, const ComplexVector& psi,
                            const SymmetryBasis* coords) {
  const Eigen::Index n = psi.size();
  const auto m = static_cast<std::int64_t>(strings.size());
  RealMatrix out(2 * n, m);
#pragma omp parallel
  {
    ComplexVector image(n);
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < m; ++k) {
      apply_pauli(strings[k], {psi.data(), static_cast<std::size_t>(n)},
                  {image.data(), static_cast<std::size_t>(n)});
      if (coords != nullptr) image = coords->to_coords(image);
      out.col(k).head(n) = image.real();
      out.col(k).tail(n) = image.imag();
    }
  }
  return out;
}

void accumulate_dense(std::span<const PauliString> strings, const RealVector& h,
                      ComplexMatrix& target) {
  const auto n = static_cast<std::int64_t>(target.rows());
  for (std::size_t k = 0; k < strings.size(); ++k) {
    const double amp = h[static_cast<Eigen::Index>(k)];
    if (amp == 0.0) continue;
    const auto& p = strings[k];
    const std::uint64_t flip = p.flip_mask();
    const std::uint64_t sign = p.sign_mask();
    const Complex base = y_phase(p.y_count()) * amp;
#pragma omp parallel for if (n >= kParallelThreshold) schedule(static)
    for (std::int64_t b = 0; b < n; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      target(static_cast<Eigen::Index>(ub ^ flip), b) +=
          (std::popcount(ub & sign) & 1) ? -base : base;
    }
  }
}

namespace reference {

ComplexVector apply_pauli(const PauliString& p, const ComplexVector& psi, int n_sites) {
  check_sites(p, n_sites);
  const Complex i{0.0, 1.0};
  ComplexVector cur = psi;
  ComplexVector next(psi.size());
  for (const auto& f : p.ops()) {
    const std::uint64_t bit = std::uint64_t{1} << (f.site - 1);
    for (Eigen::Index b = 0; b < cur.size(); ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      const bool up = (ub & bit) == 0;
      switch (f.op) {
        case Pauli::X: next[static_cast<Eigen::Index>(ub ^ bit)] = cur[b]; break;
        case Pauli::Y: next[static_cast<Eigen::Index>(ub ^ bit)] = (up ? i : -i) * cur[b]; break;
        case Pauli::Z: next[b] = up ? cur[b] : -cur[b]; break;
      }
    }
    cur.swap(next);
  }
  return cur;
}

RealMatrix gram(const std::vector<ComplexVector>& images) {
  const auto m = static_cast<Eigen::Index>(images.size());
  RealMatrix g(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      g(a, b) = 2.0 * images[a].dot(images[b]).real();
    }
  }
  return g;
}

}  // namespace reference
}  // namespace cdforge::kernels
