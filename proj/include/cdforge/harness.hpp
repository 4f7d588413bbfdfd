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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cdforge/dynamics.hpp"
#include "cdforge/errors.hpp"

namespace cdforge {

using Json = nlohmann::json;

enum class ExperimentKind { KzSweep, StatePrep, SolveAux, Resources };

std::string to_string(ExperimentKind kind);

/// Range of an ansatz entry relative to the chain: a fixed integer, or
/// "max" / "max-k" meaning N - 1 - k.
struct RangeSpec {
  bool relative = true;
  int value = 0;  // absolute range, or the offset below N - 1

  int resolve(int n_sites) const { return relative ? n_sites - 1 - value : value; }
  std::string to_string() const;
  static RangeSpec parse(const Json& j);
};

/// One configured ansatz family. A list of max_body values expands into one
/// variant per entry, so the body count can be swept.
struct AnsatzEntry {
  AnsatzMode mode = AnsatzMode::Patterns;
  std::vector<int> max_body{2};
  RangeSpec range;
  std::vector<std::string> patterns{"yz"};
  std::string label;

  /// Concrete specs for an N-site chain, one per max_body value.
  std::vector<AnsatzSpec> resolve(int n_sites) const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::KzSweep;

  std::vector<int> sizes;
  double coupling = 1.0;

  double b0 = 2.0;
  double bf = 0.0;
  double tau = 5.0;
  std::vector<double> rates;

  std::vector<AnsatzEntry> ansatze;
  bool include_bare = true;
  bool include_exact = false;

  // single-point solve
  double point_field = 1.0;
  double point_rate = 1.0;

  // resource table
  std::vector<int> k_body;

  PropagationConfig numerics;
  int output_points = 21;

  std::string out_dir = "results";
  std::string prefix;
};

/// Parses and validates a config document, filling per-experiment defaults.
/// Unknown keys, wrong types and out-of-range values raise ConfigError.
ExperimentConfig parse_config(const Json& doc);

/// Applies "a.b.c=value" overrides to a raw document. Values are read as
/// JSON when they parse, otherwise as strings.
void apply_overrides(Json& doc, const std::vector<std::string>& overrides);

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// The fully resolved config, defaults included.
Json to_json(const ExperimentConfig& config);

using Cell = std::variant<long long, double, std::string>;

struct ResultTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  Json metadata = Json::object();

  void add_row(std::vector<Cell> row);
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
  const std::string& text(std::size_t row, const std::string& column) const;

  /// '#'-prefixed JSON metadata line, a header line, then one line per row.
  /// Doubles print with 17 significant digits.
  std::string to_csv() const;
  void write(const std::string& dir) const;
};

struct RunOutput {
  std::vector<ResultTable> tables;
  /// Cells or variants that failed and were flagged instead of aborting.
  int failures = 0;
};

RunOutput run_kz_sweep(const ExperimentConfig& config);
RunOutput run_state_prep(const ExperimentConfig& config);
RunOutput solve_aux_once(const ExperimentConfig& config);
RunOutput resources(const ExperimentConfig& config);

/// Dispatches on config.kind.
RunOutput run_experiment(const ExperimentConfig& config);

/// Adds the resolved config, tool version and timing to every table and
/// writes them under `dir`. Wall time and the clock reading live together
/// under "timestamp", the only field that differs between repeated runs.
void write_tables(RunOutput& output, const ExperimentConfig& config, const std::string& dir,
                  double wall_seconds);

/// Short tag for an error class, used in flag columns.
std::string error_tag(const std::exception& e);

}  // namespace cdforge
