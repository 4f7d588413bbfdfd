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

// Parallel kernels against their serial references.
//
//   bench_kernels --benchmark_filter=Apply

#include <random>

#include <benchmark/benchmark.h>

#include "cdforge/kernels.hpp"

using namespace cdforge;

namespace {

ComplexVector random_state(int n) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  ComplexVector v(Eigen::Index{1} << n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v.normalized();
}

PauliString wide_string(int n) {
  std::vector<SiteOp> ops;
  for (int j = 1; j <= n; ++j) ops.push_back({j, static_cast<Pauli>(j % 3)});
  return PauliString(ops);
}

std::vector<PauliString> yz_pairs(int n) {
  std::vector<PauliString> out;
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      if (a != b) out.push_back(PauliString({{a, Pauli::Y}, {b, Pauli::Z}}));
    }
  }
  return out;
}

void ApplyParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ComplexVector psi = random_state(n);
  const PauliString p = wide_string(n);
  ComplexVector out(psi.size());
  for (auto _ : state) {
    kernels::apply_pauli(p, std::span<const Complex>(psi.data(), psi.size()),
                         std::span<Complex>(out.data(), out.size()));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * psi.size());
}

void ApplyReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ComplexVector psi = random_state(n);
  const PauliString p = wide_string(n);
  for (auto _ : state) {
    ComplexVector out = kernels::reference::apply_pauli(p, psi, n);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * psi.size());
}

void GramParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ComplexVector psi = random_state(n);
  const RealMatrix images = kernels::realified_images(yz_pairs(n), psi);
  for (auto _ : state) {
    RealMatrix g = kernels::gram(images);
    benchmark::DoNotOptimize(g.data());
  }
}

void GramReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ComplexVector psi = random_state(n);
  std::vector<ComplexVector> images;
  for (const auto& p : yz_pairs(n)) images.push_back(kernels::reference::apply_pauli(p, psi, n));
  for (auto _ : state) {
    RealMatrix g = kernels::reference::gram(images);
    benchmark::DoNotOptimize(g.data());
  }
}

}  // namespace

BENCHMARK(ApplyParallel)->DenseRange(12, 20, 4);
BENCHMARK(ApplyReference)->DenseRange(12, 20, 4);
BENCHMARK(GramParallel)->Arg(8)->Arg(10)->Arg(12);
BENCHMARK(GramReference)->Arg(8)->Arg(10)->Arg(12);

BENCHMARK_MAIN();
