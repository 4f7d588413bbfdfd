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

// cdforge: config-driven runs of the counterdiabatic driving experiments.
//
//   cdforge kz-sweep   --config sweep.json --out results --threads 4
//   cdforge state-prep --config prep.json --override protocol.tau=8
//   cdforge solve-aux  --config point.json
//   cdforge resources  --config counts.json

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <omp.h>

#include "cdforge/harness.hpp"

namespace {

enum Exit { kOk = 0, kInternal = 1, kConfig = 2, kNumeric = 3, kPartial = 4 };

const char* expected_kind(const std::string& sub) {
  if (sub == "kz-sweep") return "kz_sweep";
  if (sub == "state-prep") return "state_prep";
  if (sub == "solve-aux") return "solve_aux";
  return "resources";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterdiabatic driving experiments on the transverse-field Ising chain"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::vector<std::string> overrides;

  for (const char* name : {"kz-sweep", "state-prep", "solve-aux", "resources"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--threads", threads, "Worker threads across sweep cells")->check(CLI::PositiveNumber);
    sub->add_option("--override", overrides, "key.path=value applied to the config before validation");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    std::ifstream in(config_path);
    cdforge::Json doc = cdforge::Json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw cdforge::ConfigError("config '" + config_path + "' is not a JSON object");
    }
    // The subcommand names the experiment; the config may omit it but not contradict it.
    const std::string kind = expected_kind(sub);
    if (!doc.contains("experiment")) doc["experiment"] = kind;
    if (doc["experiment"] != kind) {
      throw cdforge::ConfigError("config describes '" + doc["experiment"].dump() + "' but the subcommand is " + sub);
    }
    cdforge::apply_overrides(doc, overrides);
    cdforge::ExperimentConfig config = cdforge::parse_config(doc);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (threads > 0) omp_set_num_threads(threads);
    omp_set_max_active_levels(1);

    const auto start = std::chrono::steady_clock::now();
    cdforge::RunOutput output = cdforge::run_experiment(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    cdforge::write_tables(output, config, config.out_dir, wall);

    for (const auto& t : output.tables) {
      std::cerr << "wrote " << config.out_dir << "/" << t.name << ".csv (" << t.rows.size() << " rows)\n";
    }
    if (output.failures > 0) {
      std::cerr << output.failures << " cell(s) failed; see error_flag / metadata\n";
      return kPartial;
    }
    return kOk;
  } catch (const cdforge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const cdforge::Error& e) {
    std::cerr << cdforge::error_tag(e) << " error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}
