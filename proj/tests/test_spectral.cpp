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

#include <random>

#include <doctest.h>

#include "cdforge/errors.hpp"
#include "cdforge/spectral.hpp"
#include "cdforge/symmetry.hpp"
#include "oracles.hpp"

using namespace cdforge;

TEST_CASE("symmetry basis is orthonormal and complete") {
  for (int n : {1, 2, 3, 4, 5, 6}) {
    const SymmetryBasis basis(n);
    Eigen::Index total = 0;
    RealMatrix all(basis.full_dim(), basis.full_dim());
    for (int s = 0; s < kSectorCount; ++s) {
      const Eigen::Index d = basis.sector_dim(s);
      if (d > 0) all.middleCols(total, d) = basis.embed(s, RealMatrix::Identity(d, d));
      CHECK(basis.sector_offset(s) == total);
      total += d;
    }
    CHECK(total == basis.full_dim());
    CHECK((all.transpose() * all - RealMatrix::Identity(total, total)).norm() < 1e-13);
  }
}

TEST_CASE("sector blocks commute with the Ising Hamiltonian") {
  const IsingModel model{6, 1.0};
  const SymmetryBasis basis(6);
  const ComplexMatrix h = build_hamiltonian(model, 0.7);
  for (int s = 0; s < kSectorCount; ++s) CHECK(basis.leakage(s, h) < 1e-12);
  const ComplexMatrix breaking = h + oracle::kron_string("yiiiii");
  CHECK(basis.leakage(0, breaking) > 0.1);
}

TEST_CASE("Hamiltonian matches Kronecker construction") {
  for (int n : {1, 2, 3, 5}) {
    for (double b : {0.0, 0.4, 1.7}) {
      const IsingModel model{n, -0.8};
      CHECK((build_hamiltonian(model, b) - oracle::ising(n, -0.8, b)).norm() < 1e-13);
    }
  }
  const IsingModel model{4, 1.0};
  CHECK((field_derivative(model) - (oracle::ising(4, 0.0, 1.0))).norm() < 1e-13);
}

TEST_CASE("sector-resolved spectrum equals dense diagonalization") {
  for (int n : {2, 3, 4, 6}) {
    for (double b : {0.3, 1.0, 2.5}) {
      const IsingModel model{n, 1.0};
      const SpectralSnapshot snap = diagonalize(model, b);
      Eigen::SelfAdjointEigenSolver<RealMatrix> dense(oracle::ising(n, 1.0, b).real());
      CHECK((snap.eigenvalues - dense.eigenvalues()).cwiseAbs().maxCoeff() < 1e-11);
      const ComplexMatrix h = build_hamiltonian(model, b);
      const ComplexMatrix& v = snap.eigenvectors;
      CHECK((h * v - v * snap.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff() < 1e-11);
      CHECK(snap.sectors[0] == 0);
    }
  }
}

TEST_CASE("B = 0 ground state is the symmetric cat") {
  const SpectralSnapshot snap = diagonalize(IsingModel{4, 1.0}, 0.0);
  CHECK(snap.sectors[0] == 0);
  // Neel states 0101 and 1010 in equal weight.
  CHECK(std::norm(snap.eigenvectors(0b0101, 0)) == doctest::Approx(0.5));
  CHECK(std::norm(snap.eigenvectors(0b1010, 0)) == doctest::Approx(0.5));
}

TEST_CASE("exact auxiliary term matches finite differences of eigenvectors") {
  for (int n : {2, 3, 4}) {
    const IsingModel model{n, 1.0};
    for (double b : {0.35, 1.15, 2.6}) {
      const auto fd = oracle::finite_difference_aux(n, 1.0, b, -0.7);
      REQUIRE(fd.min_gap > 1e-3);
      const AuxMatrix aux = exact_aux(diagonalize(model, b), field_derivative(model), -0.7);
      CHECK((aux.matrix - fd.matrix).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("auxiliary term is i times a real antisymmetric matrix") {
  const IsingModel model{5, 1.0};
  const AuxMatrix aux = exact_aux(diagonalize(model, 0.8), field_derivative(model), 1.3);
  CHECK(aux.matrix.real().cwiseAbs().maxCoeff() < 1e-12);
  const RealMatrix im = aux.matrix.imag();
  CHECK((im + im.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("auxiliary term is gauge invariant") {
  const IsingModel model{4, 1.0};
  SpectralSnapshot snap = diagonalize(model, 0.9);
  const ComplexMatrix dh = field_derivative(model);
  const AuxMatrix before = exact_aux(snap, dh, 1.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  for (Eigen::Index k = 0; k < snap.size(); ++k) snap.eigenvectors.col(k) *= std::polar(1.0, phase(rng));
  const AuxMatrix after = exact_aux(snap, dh, 1.0);
  CHECK((before.matrix - after.matrix).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("auxiliary action equals the matrix applied to the level") {
  const IsingModel model{5, 1.0};
  const SpectralSnapshot snap = diagonalize(model, 1.4);
  const ComplexMatrix dh = field_derivative(model);
  const AuxMatrix aux = exact_aux(snap, dh, 0.6);
  for (Eigen::Index level : {0, 3}) {
    const ComplexVector direct = aux.matrix * snap.eigenvectors.col(level);
    CHECK((aux_action(snap, dh, 0.6, level) - direct).norm() < 1e-12);
  }
}

TEST_CASE("zero rate gives a zero auxiliary term even at degeneracies") {
  const IsingModel model{4, 1.0};
  const SpectralSnapshot snap = diagonalize(model, 0.0);
  CHECK(exact_aux(snap, field_derivative(model), 0.0).matrix.norm() == 0.0);
}

TEST_CASE("coupled degeneracies are reported") {
  // An unstructured snapshot of a degenerate matrix: every pair counts as coupled.
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  h.diagonal() << 1.0, 1.0, 2.0, 3.0;
  const SpectralSnapshot snap = diagonalize(h);
  CHECK_THROWS_AS(exact_aux(snap, ComplexMatrix::Identity(4, 4), 1.0), DegeneracyError);
}

TEST_CASE("generic diagonalization rejects non-Hermitian input") {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 1) = 1.0;
  CHECK_THROWS_AS(diagonalize(h), ContractError);
}

TEST_CASE("adiabatic states follow the previous gauge") {
  const IsingModel model{4, 1.0};
  const StateVector a = adiabatic_state(diagonalize(model, 1.0), 0);
  SpectralSnapshot next = diagonalize(model, 1.001);
  next.eigenvectors.col(0) *= Complex(0.0, 1.0);
  const StateVector b = adiabatic_state(next, 0, &a);
  const Complex overlap = a.amplitudes().dot(b.amplitudes());
  CHECK(overlap.imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(overlap.real() > 0.99);
}
