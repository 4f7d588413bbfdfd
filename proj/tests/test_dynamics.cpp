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

#include <doctest.h>

#include "cdforge/dynamics.hpp"
#include "cdforge/errors.hpp"
#include "oracles.hpp"

using namespace cdforge;

namespace {

StateVector ground(const IsingModel& m, double b) { return adiabatic_state(diagonalize(m, b), 0); }

PropagationConfig fixed_step(double dt) {
  PropagationConfig cfg;
  cfg.dt = dt;
  cfg.check_convergence = false;
  return cfg;
}

}  // namespace

TEST_CASE("linear schedule") {
  const auto p = QuenchProtocol::linear(2.0, 0.5, 0.0);
  CHECK(p.duration() == doctest::Approx(4.0));
  CHECK(field(p, 1.0) == doctest::Approx(1.5));
  CHECK(field_rate(p, 3.0) == doctest::Approx(-0.5));
  CHECK(critical_time(p, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(field(p, 4.1), DomainError);
  CHECK_THROWS_AS(field(p, -0.1), DomainError);
  CHECK_THROWS_AS(QuenchProtocol::linear(2.0, 0.0).validate(), ConfigError);
  CHECK_THROWS_AS(QuenchProtocol::linear(0.0, 1.0, 2.0).validate(), ConfigError);
  CHECK_THROWS_AS(critical_time(QuenchProtocol::linear(3.0, 1.0, 2.0), 1.0), DomainError);
}

TEST_CASE("cubic schedule is silent at both ends") {
  const auto p = QuenchProtocol::cubic(2.0, 0.0, 5.0);
  CHECK(field(p, 0.0) == 2.0);
  CHECK(field(p, 5.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(field_rate(p, 0.0) == 0.0);
  CHECK(field_rate(p, 5.0) == 0.0);
  CHECK(field(p, 2.5) == doctest::Approx(1.0));
  const double tc = critical_time(p, 1.0);
  CHECK(tc == doctest::Approx(2.5).epsilon(1e-11));
  // Rate from a central difference of the schedule.
  const double h = 1e-6;
  CHECK(field_rate(p, 1.3) == doctest::Approx((field(p, 1.3 + h) - field(p, 1.3 - h)) / (2 * h)).epsilon(1e-8));
  CHECK_THROWS_AS(QuenchProtocol::cubic(2.0, 0.0, 0.0).validate(), ConfigError);
}

TEST_CASE("bare propagation matches matrix-exponential evolution") {
  const IsingModel model{4, 1.0};
  const auto p = QuenchProtocol::linear(2.0, 1.0, 0.0);
  const auto grid = uniform_grid(0.0, p.duration(), 5);
  const double dt = 2e-3;
  const StateVector psi0 = ground(model, 2.0);
  const TrajectoryRecord rec = propagate(model, p, Driving::bare(), psi0, fixed_step(dt), grid);

  // The oracle integrates the same schedule with ten times finer steps.
  const oracle::CVec final = oracle::expm_evolve(
      [&](double t) { return oracle::ising(4, 1.0, field(p, t)); }, psi0.amplitudes(), 0.0,
      p.duration(), static_cast<long>(std::lround(p.duration() / (dt / 10))));
  const StateVector target = ground(model, 0.0);
  const double f_oracle = std::norm(target.amplitudes().dot(final));
  CHECK(rec.final_fidelity() == doctest::Approx(f_oracle).epsilon(1e-5));
  CHECK(rec.norm_drift < 1e-10);
}

TEST_CASE("exact auxiliary driving matches matrix-exponential evolution") {
  const IsingModel model{3, 1.0};
  const auto p = QuenchProtocol::cubic(2.0, 0.2, 2.0);
  const auto grid = uniform_grid(0.0, p.duration(), 3);
  const StateVector psi0 = ground(model, 2.0);
  const TrajectoryRecord rec = propagate(model, p, Driving::exact(), psi0, fixed_step(2e-3), grid);
  const oracle::CVec final = oracle::expm_evolve(
      [&](double t) {
        const double b = field(p, t);
        // The auxiliary matrix itself is checked against finite differences elsewhere;
        // here only the integrator is under test.
        return oracle::CMat(oracle::ising(3, 1.0, b) +
                            exact_aux(diagonalize(model, b), field_derivative(model), field_rate(p, t)).matrix);
      },
      psi0.amplitudes(), 0.0, p.duration(), 4000);
  const double f_oracle = std::norm(ground(model, 0.2).amplitudes().dot(final));
  CHECK(f_oracle > 1 - 1e-6);
  CHECK(rec.final_fidelity() > 1 - 1e-6);
}

TEST_CASE("slow quenches approach the adiabatic limit") {
  const IsingModel model{4, 1.0};
  const StateVector psi0 = ground(model, 2.0);
  double previous = 1.0;
  // Rates in the regime where the defect density falls monotonically.
  for (double v : {2.0, 1.0, 0.5}) {
    const auto p = QuenchProtocol::linear(2.0, v, 0.0);
    PropagationConfig cfg;
    const auto rec = propagate(model, p, Driving::bare(), psi0, cfg, uniform_grid(0.0, p.duration(), 3));
    CHECK(rec.final_defect_density() < previous);
    previous = rec.final_defect_density();
  }
  const auto slow = QuenchProtocol::linear(2.0, 0.01, 0.0);
  const auto rec = propagate(model, slow, Driving::bare(), psi0, PropagationConfig{},
                             uniform_grid(0.0, slow.duration(), 3));
  CHECK(rec.final_defect_density() < 1e-3);
}

TEST_CASE("step halving converges and the finer run is kept") {
  const IsingModel model{4, 1.0};
  const auto p = QuenchProtocol::linear(2.0, 2.0, 0.0);
  PropagationConfig cfg;
  const auto rec = propagate(model, p, Driving::with(AnsatzSpec::canonical(2, 1)), ground(model, 2.0),
                             cfg, uniform_grid(0.0, p.duration(), 3));
  CHECK(rec.refinements >= 1);
  CHECK(rec.convergence_delta <= cfg.convergence_tol);
  CHECK(rec.dt_used == doctest::Approx(1e-3 * p.duration() / (1 << rec.refinements)));
}

TEST_CASE("a capped refinement budget raises a convergence error") {
  const IsingModel model{3, 1.0};
  const auto p = QuenchProtocol::linear(2.0, 5.0, 0.0);
  PropagationConfig cfg;
  cfg.dt = 0.1;
  cfg.max_refinements = 1;
  cfg.convergence_tol = 1e-14;
  CHECK_THROWS_AS(propagate(model, p, Driving::bare(), ground(model, 2.0), cfg, uniform_grid(0, p.duration(), 2)),
                  ConvergenceError);
}

TEST_CASE("exact and complete-basis driving are transitionless") {
  const IsingModel model{3, 1.0};
  const auto p = QuenchProtocol::linear(2.0, 5.0, 0.0);
  const auto grid = uniform_grid(0.0, p.duration(), 11);
  const StateVector psi0 = ground(model, 2.0);
  const auto bare = propagate(model, p, Driving::bare(), psi0, PropagationConfig{}, grid);
  const auto exact = propagate(model, p, Driving::exact(), psi0, PropagationConfig{}, grid);
  const auto full = propagate(model, p, Driving::with(AnsatzSpec::canonical(3, 2)), psi0, PropagationConfig{}, grid);
  CHECK(bare.final_defect_density() > 0.1);
  for (double n : exact.defect_density) CHECK(n < 1e-9);
  for (double n : full.defect_density) CHECK(n < 1e-9);
  CHECK(exact.label == "exact");
  CHECK(full.label == "full3_R2");
  CHECK(full.strings.size() == 63);
}

TEST_CASE("recorded amplitudes vanish where the cubic schedule stops") {
  const IsingModel model{4, 1.0};
  const auto p = QuenchProtocol::cubic(2.0, 0.0, 2.0);
  PropagationConfig cfg = fixed_step(5e-3);
  cfg.record_amplitudes = true;
  const auto rec = propagate(model, p, Driving::with(AnsatzSpec::two_body_yz(4)), ground(model, 2.0), cfg,
                             uniform_grid(0.0, p.duration(), 5));
  REQUIRE(rec.amplitudes.size() == 5);
  CHECK(rec.amplitudes.front().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rec.amplitudes.back().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rec.amplitudes[2].cwiseAbs().maxCoeff() > 1e-2);
}

TEST_CASE("input validation") {
  const IsingModel model{3, 1.0};
  const auto p = QuenchProtocol::linear(2.0, 1.0, 0.0);
  const StateVector psi0 = ground(model, 2.0);
  const std::vector<double> backwards{1.0, 0.5};
  CHECK_THROWS_AS(propagate(model, p, Driving::bare(), psi0, PropagationConfig{}, backwards), ConfigError);
  const std::vector<double> outside{0.0, 3.0};
  CHECK_THROWS_AS(propagate(model, p, Driving::bare(), psi0, PropagationConfig{}, outside), DomainError);
  CHECK_THROWS_AS(propagate(IsingModel{4, 1.0}, p, Driving::bare(), psi0, PropagationConfig{},
                            uniform_grid(0, 1, 2)),
                  ConfigError);
  CHECK_THROWS_AS(uniform_grid(0, 1, 1), ConfigError);
}
