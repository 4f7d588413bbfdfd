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

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cdforge/harness.hpp"

namespace cdforge {
namespace {

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

ExperimentKind parse_kind(const std::string& s) {
  if (s == "kz_sweep") return ExperimentKind::KzSweep;
  if (s == "state_prep") return ExperimentKind::StatePrep;
  if (s == "solve_aux") return ExperimentKind::SolveAux;
  if (s == "resources") return ExperimentKind::Resources;
  throw ConfigError("unknown experiment '" + s + "'");
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw ConfigError("rate grid needs 0 < min <= max");
  }
  if (points < 1) throw ConfigError("rate grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    out[static_cast<std::size_t>(k)] =
        lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

AnsatzEntry yz_full() { return AnsatzEntry{}; }

AnsatzEntry three_body_truncated() {
  AnsatzEntry e;
  e.mode = AnsatzMode::CanonicalFull;
  e.max_body = {3};
  e.range = RangeSpec{true, 4};
  e.patterns.clear();
  return e;
}

AnsatzEntry parse_ansatz(const Json& j) {
  check_keys(j, {"mode", "max_body", "range", "patterns", "label"}, "ansatz entry");
  AnsatzEntry e;
  const std::string mode = j.value("mode", std::string("patterns"));
  if (mode == "canonical") {
    e.mode = AnsatzMode::CanonicalFull;
    e.patterns.clear();
    if (j.contains("patterns")) throw ConfigError("canonical ansatz takes no patterns");
  } else if (mode != "patterns") {
    throw ConfigError("ansatz mode must be 'patterns' or 'canonical'");
  }
  if (j.contains("patterns")) e.patterns = j.at("patterns").get<std::vector<std::string>>();
  if (j.contains("max_body")) {
    const Json& mb = j.at("max_body");
    e.max_body = mb.is_array() ? mb.get<std::vector<int>>() : std::vector<int>{mb.get<int>()};
  } else if (e.mode == AnsatzMode::Patterns && !e.patterns.empty()) {
    e.max_body = {static_cast<int>(e.patterns.front().size())};
  }
  if (e.max_body.empty()) throw ConfigError("max_body list is empty");
  if (j.contains("range")) e.range = RangeSpec::parse(j.at("range"));
  read(j, "label", e.label);

  if (e.mode == AnsatzMode::Patterns) {
    if (e.patterns.empty()) throw ConfigError("patterns ansatz needs at least one pattern");
    if (e.max_body.size() != 1) throw ConfigError("patterns ansatz takes a single max_body");
    for (const auto& p : e.patterns) {
      if (static_cast<int>(p.size()) != e.max_body.front()) {
        throw ConfigError("pattern '" + p + "' does not have max_body components");
      }
      for (char c : p) pauli_from_char(c);
    }
  }
  for (int k : e.max_body) {
    if (k < 1) throw ConfigError("max_body must be >= 1");
  }
  return e;
}

Json ansatz_json(const AnsatzEntry& e) {
  Json j;
  j["mode"] = e.mode == AnsatzMode::CanonicalFull ? "canonical" : "patterns";
  j["max_body"] = e.max_body;
  j["range"] = e.range.to_string();
  if (e.mode == AnsatzMode::Patterns) j["patterns"] = e.patterns;
  j["label"] = e.label;
  return j;
}

void apply_defaults(ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::KzSweep:
      c.sizes = {4, 6, 8};
      c.rates = log_grid(0.05, 10.0, 12);
      c.ansatze = {yz_full()};
      c.output_points = 21;
      break;
    case ExperimentKind::StatePrep:
      c.sizes = {8};
      c.ansatze = {yz_full(), three_body_truncated()};
      c.output_points = 101;
      break;
    case ExperimentKind::SolveAux:
      c.sizes = {4};
      c.ansatze = {yz_full()};
      break;
    case ExperimentKind::Resources:
      c.sizes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      break;
  }
}

void validate(const ExperimentConfig& c) {
  if (c.sizes.empty()) throw ConfigError("model.sizes is empty");
  if (c.kind == ExperimentKind::Resources) {
    for (int n : c.sizes) {
      if (n < 1) throw ConfigError("resource sizes must be >= 1");
    }
    for (int k : c.k_body) {
      if (k < 1) throw ConfigError("resources.k_body entries must be >= 1");
    }
    return;
  }
  for (int n : c.sizes) {
    if (n < 2 || n > kDefaultMaxDenseSites) {
      throw ConfigError("chain length " + std::to_string(n) + " outside [2, " +
                        std::to_string(kDefaultMaxDenseSites) + "]");
    }
  }
  IsingModel{c.sizes.front(), c.coupling}.validate();
  c.numerics.validate();
  if (c.output_points < 2) throw ConfigError("numerics.output_points must be >= 2");
  if (c.kind != ExperimentKind::SolveAux && !c.include_bare && !c.include_exact && c.ansatze.empty()) {
    throw ConfigError("nothing to run: no ansatz and no bare or exact driving");
  }
  switch (c.kind) {
    case ExperimentKind::KzSweep:
      if (c.rates.empty()) throw ConfigError("protocol.rates is empty");
      for (double v : c.rates) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("rates must be positive and finite");
        QuenchProtocol p = QuenchProtocol::linear(c.b0, v, c.bf);
        p.validate();
        try {
          critical_time(p, c.coupling);
        } catch (const DomainError& e) {
          throw ConfigError(std::string("kz sweep must cross the critical point: ") + e.what());
        }
      }
      break;
    case ExperimentKind::StatePrep:
      QuenchProtocol::cubic(c.b0, c.bf, c.tau).validate();
      break;
    case ExperimentKind::SolveAux:
      if (c.ansatze.empty()) throw ConfigError("solve_aux needs an ansatz");
      if (!std::isfinite(c.point_field) || !std::isfinite(c.point_rate)) {
        throw ConfigError("point.field and point.rate must be finite");
      }
      break;
    case ExperimentKind::Resources:
      break;
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::KzSweep: return "kz_sweep";
    case ExperimentKind::StatePrep: return "state_prep";
    case ExperimentKind::SolveAux: return "solve_aux";
    case ExperimentKind::Resources: return "resources";
  }
  return "?";
}

std::string RangeSpec::to_string() const {
  if (!relative) return std::to_string(value);
  return value == 0 ? "max" : "max-" + std::to_string(value);
}

RangeSpec RangeSpec::parse(const Json& j) {
  if (j.is_number_integer()) return {false, j.get<int>()};
  if (!j.is_string()) throw ConfigError("range must be an integer, \"max\" or \"max-k\"");
  const auto s = j.get<std::string>();
  if (s == "max") return {true, 0};
  if (s.rfind("max-", 0) == 0) {
    std::size_t used = 0;
    int k = -1;
    try {
      k = std::stoi(s.substr(4), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == s.size() - 4 && k >= 0) return {true, k};
  }
  throw ConfigError("cannot read range '" + s + "'");
}

std::vector<AnsatzSpec> AnsatzEntry::resolve(int n_sites) const {
  std::vector<AnsatzSpec> out;
  for (int k : max_body) {
    AnsatzSpec s;
    s.mode = mode;
    s.max_body = k;
    s.range = range.resolve(n_sites);
    for (const auto& p : patterns) {
      std::vector<Pauli> comps;
      for (char c : p) comps.push_back(pauli_from_char(c));
      s.patterns.push_back(std::move(comps));
    }
    if (!label.empty()) s.label = max_body.size() > 1 ? label + "_K" + std::to_string(k) : label;
    s.validate(n_sites);
    out.push_back(std::move(s));
  }
  return out;
}

ExperimentConfig parse_config(const Json& doc) {
  try {
    check_keys(doc, {"experiment", "model", "protocol", "ansatze", "drivings", "point", "resources",
                     "numerics", "output"},
               "config");
    if (!doc.contains("experiment")) throw ConfigError("config needs an 'experiment' field");
    ExperimentConfig c;
    c.kind = parse_kind(doc.at("experiment").get<std::string>());
    apply_defaults(c);

    if (doc.contains("model")) {
      const Json& m = doc.at("model");
      check_keys(m, {"sizes", "coupling"}, "model");
      read(m, "sizes", c.sizes);
      read(m, "coupling", c.coupling);
    }
    if (doc.contains("protocol")) {
      const Json& p = doc.at("protocol");
      check_keys(p, {"b0", "bf", "tau", "rates"}, "protocol");
      read(p, "b0", c.b0);
      read(p, "bf", c.bf);
      read(p, "tau", c.tau);
      if (p.contains("rates")) {
        const Json& r = p.at("rates");
        if (r.is_array()) {
          c.rates = r.get<std::vector<double>>();
        } else {
          check_keys(r, {"min", "max", "points"}, "protocol.rates");
          c.rates = log_grid(r.value("min", 0.05), r.value("max", 10.0), r.value("points", 12));
        }
      }
    }
    if (doc.contains("ansatze")) {
      c.ansatze.clear();
      for (const Json& a : doc.at("ansatze")) c.ansatze.push_back(parse_ansatz(a));
    }
    if (doc.contains("drivings")) {
      const Json& d = doc.at("drivings");
      check_keys(d, {"bare", "exact"}, "drivings");
      read(d, "bare", c.include_bare);
      read(d, "exact", c.include_exact);
    }
    if (doc.contains("point")) {
      const Json& p = doc.at("point");
      check_keys(p, {"field", "rate"}, "point");
      read(p, "field", c.point_field);
      read(p, "rate", c.point_rate);
    }
    if (doc.contains("resources")) {
      const Json& r = doc.at("resources");
      check_keys(r, {"k_body"}, "resources");
      read(r, "k_body", c.k_body);
    }
    if (doc.contains("numerics")) {
      const Json& n = doc.at("numerics");
      check_keys(n, {"dt", "dt_fraction", "max_refinements", "convergence_tol", "check_convergence",
                     "norm_tol", "cutoff", "gap_tol", "resolve_aux_every_step", "output_points"},
                 "numerics");
      auto& p = c.numerics;
      read(n, "dt", p.dt);
      read(n, "dt_fraction", p.dt_fraction);
      read(n, "max_refinements", p.max_refinements);
      read(n, "convergence_tol", p.convergence_tol);
      read(n, "check_convergence", p.check_convergence);
      read(n, "norm_tol", p.norm_tol);
      read(n, "cutoff", p.cutoff);
      read(n, "resolve_aux_every_step", p.resolve_aux_every_step);
      read(n, "output_points", c.output_points);
      if (n.contains("gap_tol") && !n.at("gap_tol").is_null()) {
        p.gap_tol = n.at("gap_tol").get<double>();
        if (!(*p.gap_tol > 0.0)) throw ConfigError("numerics.gap_tol must be positive");
      }
    }
    if (doc.contains("output")) {
      const Json& o = doc.at("output");
      check_keys(o, {"dir", "prefix"}, "output");
      read(o, "dir", c.out_dir);
      read(o, "prefix", c.prefix);
    }
    validate(c);
    return c;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

void apply_overrides(Json& doc, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + item + "' is not key=value");
    }
    const std::string path = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    Json* node = &doc;
    std::stringstream parts(path);
    std::string key;
    std::vector<std::string> keys;
    while (std::getline(parts, key, '.')) {
      if (key.empty()) throw ConfigError("override key '" + path + "' has an empty segment");
      keys.push_back(key);
    }
    for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
      Json& next = (*node)[keys[k]];
      if (next.is_null()) next = Json::object();
      if (!next.is_object()) throw ConfigError("override path '" + path + "' crosses a non-object");
      node = &next;
    }
    (*node)[keys.back()] = std::move(value);
  }
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config '" + path + "' is not valid JSON");
  apply_overrides(doc, overrides);
  return parse_config(doc);
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["experiment"] = to_string(c.kind);
  j["model"] = {{"sizes", c.sizes}, {"coupling", c.coupling}};
  j["protocol"] = {{"b0", c.b0}, {"bf", c.bf}, {"tau", c.tau}, {"rates", c.rates}};
  j["ansatze"] = Json::array();
  for (const auto& a : c.ansatze) j["ansatze"].push_back(ansatz_json(a));
  j["drivings"] = {{"bare", c.include_bare}, {"exact", c.include_exact}};
  j["point"] = {{"field", c.point_field}, {"rate", c.point_rate}};
  j["resources"] = {{"k_body", c.k_body}};
  const auto& p = c.numerics;
  j["numerics"] = {{"dt", p.dt},
                   {"dt_fraction", p.dt_fraction},
                   {"max_refinements", p.max_refinements},
                   {"convergence_tol", p.convergence_tol},
                   {"check_convergence", p.check_convergence},
                   {"norm_tol", p.norm_tol},
                   {"cutoff", p.cutoff},
                   {"gap_tol", p.gap_tol ? Json(*p.gap_tol) : Json(nullptr)},
                   {"resolve_aux_every_step", p.resolve_aux_every_step},
                   {"output_points", c.output_points}};
  j["output"] = {{"dir", c.out_dir}, {"prefix", c.prefix}};
  return j;
}

}  // namespace cdforge
