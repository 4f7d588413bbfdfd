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

// Data-parallel inner loops. Every kernel writes each output element from a
// single iteration so results do not depend on the thread count. The serial
// versions in `reference` use a different formulation and exist for tests and
// the benchmark.

#include <span>

#include "cdforge/pauli.hpp"
#include "cdforge/symmetry.hpp"

namespace cdforge::kernels {

/// out = P in, with in.size() == out.size() == 2^N. `in` and `out` must not alias.
void apply_pauli(const PauliString& p, std::span<const Complex> in, std::span<Complex> out);

/// Upper triangle (and mirrored lower) of 2 * columns^T * columns, one dot
/// product per entry. Each dot runs over the overlap of the two columns'
/// nonzero row ranges, so structurally disjoint columns give an exact zero.
RealMatrix gram(const RealMatrix& columns);

/// out(:, k) = P_k psi for every string, stacked as [Re; Im] real columns.
/// With `coords`, each image is expressed in the symmetry-adapted basis
/// (sectors concatenated) before stacking.
RealMatrix realified_images(std::span<const PauliString> strings, const ComplexVector& psi,
                            const SymmetryBasis* coords = nullptr);

/// Adds sum_k h_k P_k into a dense matrix, O(2^N) per string.
void accumulate_dense(std::span<const PauliString> strings, const RealVector& h,
                      ComplexMatrix& target);

namespace reference {

/// Site-by-site application of single-qubit Paulis.
ComplexVector apply_pauli(const PauliString& p, const ComplexVector& psi, int n_sites);

/// Gram matrix from complex images, 2 Re<phi_i|phi_j> computed entry by entry.
RealMatrix gram(const std::vector<ComplexVector>& images);

}  // namespace reference
}  // namespace cdforge::kernels
