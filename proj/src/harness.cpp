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

#include <algorithm>
#include <cmath>
#include <ctime>
#include <limits>

#include "cdforge/harness.hpp"

#ifndef CDFORGE_VERSION
#define CDFORGE_VERSION "unknown"
#endif

namespace cdforge {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// What a single sweep cell or state-prep variant will run. A variant whose
// ansatz cannot be built at this N carries the reason instead of a driving.
struct Variant {
  std::string label;
  std::optional<Driving> driving;
  std::string error_tag;
  std::string error_message;
};

std::string entry_label(const AnsatzEntry& e, int k) {
  if (!e.label.empty()) return e.max_body.size() > 1 ? e.label + "_K" + std::to_string(k) : e.label;
  std::string out = e.mode == AnsatzMode::CanonicalFull ? "full" + std::to_string(k) : std::to_string(k);
  if (e.mode == AnsatzMode::Patterns) {
    for (std::size_t p = 0; p < e.patterns.size(); ++p) out += (p ? "+" : "") + e.patterns[p];
  }
  return out + "_R" + e.range.to_string();
}

std::vector<Variant> variants_for(const ExperimentConfig& c, int n_sites) {
  std::vector<Variant> out;
  if (c.include_bare) out.push_back({"none", Driving::bare(), "", ""});
  if (c.include_exact) out.push_back({"exact", Driving::exact(), "", ""});
  for (const auto& entry : c.ansatze) {
    for (int k : entry.max_body) {
      AnsatzEntry single = entry;
      single.max_body = {k};
      try {
        AnsatzSpec spec = single.resolve(n_sites).front();
        if (!entry.label.empty()) spec.label = entry_label(entry, k);
        out.push_back({spec.display_label(), Driving::with(spec), "", ""});
      } catch (const std::exception& e) {
        out.push_back({entry_label(entry, k), std::nullopt, error_tag(e), e.what()});
      }
    }
  }
  return out;
}

StateVector initial_state(const IsingModel& model, const QuenchProtocol& p, const PropagationConfig& cfg) {
  return adiabatic_state(diagonalize(model, p.b0), cfg.level, nullptr, cfg.gap_tol);
}

Json diagnostics(const TrajectoryRecord& r) {
  return {{"dt_used", r.dt_used},
          {"refinements", r.refinements},
          {"convergence_delta", std::isfinite(r.convergence_delta) ? Json(r.convergence_delta) : Json(nullptr)},
          {"norm_drift", r.norm_drift}};
}

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void require_single_size(const ExperimentConfig& c) {
  if (c.sizes.size() != 1) {
    throw ConfigError(to_string(c.kind) + " runs on a single chain length; model.sizes has " +
                      std::to_string(c.sizes.size()));
  }
}

}  // namespace

std::string error_tag(const std::exception& e) {
  if (dynamic_cast<const DegeneracyError*>(&e)) return "degeneracy";
  if (dynamic_cast<const TrackingError*>(&e)) return "tracking";
  if (dynamic_cast<const RankDeficiencyError*>(&e)) return "rank_deficiency";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const NumericError*>(&e)) return "numeric";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const ResourceError*>(&e)) return "resource";
  if (dynamic_cast<const ContractError*>(&e)) return "contract";
  return "internal";
}

RunOutput run_kz_sweep(const ExperimentConfig& c) {
  struct Job {
    int n_sites;
    double rate;
    Variant variant;
  };
  struct Outcome {
    double n_ex = kNaN;
    double t_c = kNaN;
    double max_residual = kNaN;
    std::string flag = "ok";
    Json info;
  };

  std::vector<Job> jobs;
  for (int n : c.sizes) {
    const auto variants = variants_for(c, n);
    for (double v : c.rates) {
      for (const auto& var : variants) jobs.push_back({n, v, var});
    }
  }

  std::vector<Outcome> results(jobs.size());
  const auto count = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long k = 0; k < count; ++k) {
    const Job& job = jobs[static_cast<std::size_t>(k)];
    Outcome& out = results[static_cast<std::size_t>(k)];
    const IsingModel model{job.n_sites, c.coupling};
    const QuenchProtocol protocol = QuenchProtocol::linear(c.b0, job.rate, c.bf);
    try {
      out.t_c = critical_time(protocol, c.coupling);
      if (!job.variant.driving) {
        out.flag = job.variant.error_tag;
        out.info = {{"error", job.variant.error_message}};
        continue;
      }
      const auto grid = uniform_grid(0.0, protocol.duration(), c.output_points);
      const TrajectoryRecord rec = propagate(model, protocol, *job.variant.driving,
                                             initial_state(model, protocol, c.numerics), c.numerics, grid);
      out.n_ex = rec.final_defect_density();
      out.max_residual = rec.max_residual();
      out.info = diagnostics(rec);
    } catch (const std::exception& e) {
      out.n_ex = kNaN;
      out.max_residual = kNaN;
      out.flag = error_tag(e);
      out.info = {{"error", e.what()}};
    }
  }

  std::vector<std::size_t> order(jobs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Job& x = jobs[a];
    const Job& y = jobs[b];
    if (x.n_sites != y.n_sites) return x.n_sites < y.n_sites;
    if (x.rate != y.rate) return x.rate < y.rate;
    return x.variant.label < y.variant.label;
  });

  ResultTable table;
  table.name = "kz_sweep";
  table.columns = {"N", "v", "ansatz_label", "n_ex", "t_c", "max_residual", "error_flag"};
  Json info = Json::array();
  RunOutput output;
  for (std::size_t k : order) {
    const Job& job = jobs[k];
    const Outcome& r = results[k];
    table.add_row({static_cast<long long>(job.n_sites), job.rate, job.variant.label, r.n_ex, r.t_c,
                   r.max_residual, r.flag});
    info.push_back(r.info);
    if (r.flag != "ok") ++output.failures;
  }
  table.metadata["row_diagnostics"] = std::move(info);
  output.tables.push_back(std::move(table));
  return output;
}

RunOutput run_state_prep(const ExperimentConfig& c) {
  require_single_size(c);
  const int n = c.sizes.front();
  const IsingModel model{n, c.coupling};
  const QuenchProtocol protocol = QuenchProtocol::cubic(c.b0, c.bf, c.tau);

  std::vector<double> grid = uniform_grid(0.0, protocol.duration(), c.output_points);
  std::optional<double> t_c;
  try {
    t_c = critical_time(protocol, c.coupling);
  } catch (const DomainError&) {
  }
  if (t_c) {
    const bool present = std::any_of(grid.begin(), grid.end(),
                                     [&](double t) { return std::abs(t - *t_c) < 1e-12 * c.tau; });
    if (!present) {
      grid.insert(std::upper_bound(grid.begin(), grid.end(), *t_c), *t_c);
    }
  }

  const auto variants = variants_for(c, n);
  std::vector<std::optional<TrajectoryRecord>> records(variants.size());
  std::vector<Json> errors(variants.size());
  PropagationConfig cfg = c.numerics;
  cfg.record_amplitudes = true;

  const auto count = static_cast<long>(variants.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long k = 0; k < count; ++k) {
    const Variant& var = variants[static_cast<std::size_t>(k)];
    if (!var.driving) {
      errors[static_cast<std::size_t>(k)] = {{"label", var.label}, {"error_flag", var.error_tag},
                                             {"error", var.error_message}};
      continue;
    }
    try {
      records[static_cast<std::size_t>(k)] =
          propagate(model, protocol, *var.driving, initial_state(model, protocol, cfg), cfg, grid);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = {{"label", var.label}, {"error_flag", error_tag(e)},
                                             {"error", e.what()}};
    }
  }

  std::vector<std::size_t> order(variants.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return variants[a].label < variants[b].label; });

  RunOutput output;
  ResultTable series;
  series.name = "state_prep";
  series.columns = {"t", "B", "infidelity", "residual", "ansatz_label"};
  Json failures = Json::array();
  Json info = Json::object();
  std::vector<ResultTable> flows;
  for (std::size_t k : order) {
    const Variant& var = variants[k];
    if (!records[k]) {
      failures.push_back(errors[k]);
      ++output.failures;
      continue;
    }
    const TrajectoryRecord& rec = *records[k];
    info[var.label] = diagnostics(rec);
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      series.add_row({rec.times[i], rec.fields[i], rec.defect_density[i], rec.residual[i], var.label});
    }
    if (rec.amplitudes.empty()) continue;

    ResultTable flow;
    flow.name = "amplitude_flow_" + var.label;
    flow.columns = {"t", "i1", "i2", "component_pair", "h_value"};
    flow.metadata["ansatz_label"] = var.label;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      for (std::size_t s = 0; s < rec.strings.size(); ++s) {
        const PauliString& p = rec.strings[s];
        if (p.support_size() != 2) continue;
        const auto& ops = p.ops();
        const std::string pair{to_char(ops[0].op), to_char(ops[1].op)};
        flow.add_row({rec.times[i], static_cast<long long>(ops[0].site),
                      static_cast<long long>(ops[1].site), pair,
                      rec.amplitudes[i](static_cast<Eigen::Index>(s))});
      }
    }
    flows.push_back(std::move(flow));
  }
  series.metadata["t_c"] = t_c ? Json(*t_c) : Json(nullptr);
  series.metadata["failures"] = std::move(failures);
  series.metadata["run_diagnostics"] = std::move(info);
  output.tables.push_back(std::move(series));
  for (auto& f : flows) output.tables.push_back(std::move(f));
  return output;
}

RunOutput solve_aux_once(const ExperimentConfig& c) {
  require_single_size(c);
  const int n = c.sizes.front();
  const IsingModel model{n, c.coupling};

  ResultTable amps;
  amps.name = "solve_aux_amplitudes";
  amps.columns = {"ansatz_label", "index", "string", "h_value"};
  ResultTable spectrum;
  spectrum.name = "solve_aux_spectrum";
  spectrum.columns = {"ansatz_label", "index", "eigenvalue"};
  ResultTable summary;
  summary.name = "solve_aux_summary";
  summary.columns = {"ansatz_label", "n_strings", "rank", "residual", "aux_norm_sq", "error_flag"};

  RunOutput output;
  Json errors = Json::array();
  ExperimentConfig only_ansatze = c;
  only_ansatze.include_bare = false;
  only_ansatze.include_exact = false;
  for (const Variant& var : variants_for(only_ansatze, n)) {
    try {
      if (!var.driving) throw ConfigError(var.error_message);
      const OperatorBasis basis = enumerate_basis(var.driving->ansatz, n);
      const SpectralSnapshot snap = diagonalize(model, c.point_field);
      const auto level = c.numerics.level;
      const StateVector psi = adiabatic_state(snap, level, nullptr, c.numerics.gap_tol);
      const ComplexVector aux =
          aux_action(snap, field_derivative(model), c.point_rate, level, c.numerics.gap_tol);
      const NormalSystem system = build_system(basis, psi, aux);
      const AuxSolution sol = solve(system, c.numerics.cutoff);
      for (Eigen::Index i = 0; i < basis.size(); ++i) {
        amps.add_row({var.label, static_cast<long long>(i),
                      basis.strings[static_cast<std::size_t>(i)].to_string(), sol.amplitudes(i)});
      }
      for (Eigen::Index i = 0; i < sol.gram_spectrum.size(); ++i) {
        spectrum.add_row({var.label, static_cast<long long>(i), sol.gram_spectrum(i)});
      }
      summary.add_row({var.label, static_cast<long long>(basis.size()), static_cast<long long>(sol.rank),
                       sol.residual, system.aux_norm_sq, std::string("ok")});
    } catch (const std::exception& e) {
      summary.add_row({var.label, 0LL, 0LL, kNaN, kNaN, error_tag(e)});
      errors.push_back({{"label", var.label}, {"error", e.what()}});
      ++output.failures;
    }
  }
  summary.metadata["errors"] = std::move(errors);
  output.tables.push_back(std::move(summary));
  output.tables.push_back(std::move(amps));
  output.tables.push_back(std::move(spectrum));
  return output;
}

RunOutput resources(const ExperimentConfig& c) {
  ResultTable table;
  table.name = "resources";
  table.columns = {"N", "K", "count", "error_flag"};
  RunOutput output;
  for (int n : c.sizes) {
    std::vector<int> ks = c.k_body;
    if (ks.empty()) {
      for (int k = 1; k <= n; ++k) ks.push_back(k);
    }
    for (int k : ks) {
      if (k > n) continue;
      try {
        table.add_row({static_cast<long long>(n), static_cast<long long>(k),
                       std::to_string(paper_resource_count(n, k)), std::string("ok")});
      } catch (const std::exception& e) {
        table.add_row({static_cast<long long>(n), static_cast<long long>(k), std::string(), error_tag(e)});
        ++output.failures;
      }
    }
  }
  output.tables.push_back(std::move(table));
  return output;
}

RunOutput run_experiment(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::KzSweep: return run_kz_sweep(c);
    case ExperimentKind::StatePrep: return run_state_prep(c);
    case ExperimentKind::SolveAux: return solve_aux_once(c);
    case ExperimentKind::Resources: return resources(c);
  }
  throw ContractError("unhandled experiment kind");
}

void write_tables(RunOutput& output, const ExperimentConfig& c, const std::string& dir,
                  double wall_seconds) {
  const Json config = to_json(c);
  const Json stamp = {{"utc", iso_utc_now()}, {"wall_seconds", wall_seconds}};
  for (auto& table : output.tables) {
    table.name = c.prefix + table.name;
    table.metadata["table"] = table.name;
    table.metadata["tool"] = "cdforge";
    table.metadata["version"] = CDFORGE_VERSION;
    table.metadata["config"] = config;
    table.metadata["timestamp"] = stamp;
    table.write(dir);
  }
}

}  // namespace cdforge
