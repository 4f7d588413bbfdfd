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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <omp.h>

#include "cdforge/harness.hpp"

using namespace cdforge;

namespace {

std::string strip_metadata(const std::string& csv) { return csv.substr(csv.find('\n') + 1); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("defaults per experiment") {
  const auto kz = parse_config(Json{{"experiment", "kz_sweep"}});
  CHECK(kz.sizes == std::vector<int>{4, 6, 8});
  CHECK(kz.b0 == 2.0);
  CHECK(kz.bf == 0.0);
  REQUIRE(kz.rates.size() == 12);
  CHECK(kz.rates.front() == 0.05);
  CHECK(kz.rates.back() == 10.0);
  CHECK(kz.rates[1] / kz.rates[0] == doctest::Approx(kz.rates[11] / kz.rates[10]));

  const auto sp = parse_config(Json{{"experiment", "state_prep"}});
  CHECK(sp.sizes == std::vector<int>{8});
  CHECK(sp.tau == 5.0);
  REQUIRE(sp.ansatze.size() == 2);
  const auto three = sp.ansatze[1].resolve(8).front();
  CHECK(three.mode == AnsatzMode::CanonicalFull);
  CHECK(three.max_body == 3);
  CHECK(three.range == 3);
  CHECK(sp.ansatze[0].resolve(8).front().display_label() == "2yz_R7");
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config(Json::object()), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "nope"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "kz_sweep"}, {"typo", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "kz_sweep"}, {"model", {{"sizes", {1}}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "kz_sweep"}, {"model", {{"sizes", "4"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "kz_sweep"}, {"protocol", {{"rates", {0.5, -1.0}}}}}),
                  ConfigError);
  // Never crosses B = |J0|.
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "kz_sweep"}, {"protocol", {{"b0", 0.8}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "kz_sweep"},
                                    {"ansatze", {{{"mode", "patterns"}, {"patterns", {"yq"}}}}}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "kz_sweep"}, {"ansatze", {{{"range", "max+1"}}}}}),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(Json{{"experiment", "kz_sweep"}, {"numerics", {{"cutoff", 2.0}}}}), ConfigError);
}

TEST_CASE("range expressions") {
  CHECK(RangeSpec::parse(Json("max")).resolve(8) == 7);
  CHECK(RangeSpec::parse(Json("max-4")).resolve(8) == 3);
  CHECK(RangeSpec::parse(Json(2)).resolve(8) == 2);
  CHECK(RangeSpec::parse(Json("max-4")).to_string() == "max-4");
  CHECK_THROWS_AS(RangeSpec::parse(Json("max-")), ConfigError);
  CHECK_THROWS_AS(RangeSpec::parse(Json(1.5)), ConfigError);
}

TEST_CASE("overrides use dotted paths and JSON values") {
  Json doc{{"experiment", "kz_sweep"}};
  apply_overrides(doc, {"protocol.b0=3", "model.sizes=[4]", "output.prefix=run1_"});
  const auto c = parse_config(doc);
  CHECK(c.b0 == 3.0);
  CHECK(c.sizes == std::vector<int>{4});
  CHECK(c.prefix == "run1_");
  CHECK_THROWS_AS(apply_overrides(doc, {"novalue"}), ConfigError);
}

TEST_CASE("resolved config round-trips") {
  Json doc{{"experiment", "state_prep"}, {"ansatze", {{{"mode", "canonical"}, {"max_body", {2, 3}}, {"range", "max-2"}}}}};
  const auto c = parse_config(doc);
  const auto again = parse_config(to_json(c));
  CHECK(to_json(again) == to_json(c));
}

TEST_CASE("sweep rows: ordering, bare label, per-row error flags") {
  Json doc{{"experiment", "kz_sweep"},
           {"model", {{"sizes", {4, 3}}}},
           {"protocol", {{"rates", {2.0, 1.0}}}},
           {"ansatze", {{{"mode", "canonical"}, {"max_body", 3}, {"range", "max-1"}}}},
           {"numerics", {{"output_points", 3}}}};
  const auto out = run_kz_sweep(parse_config(doc));
  const ResultTable& t = out.tables.front();
  REQUIRE(t.rows.size() == 8);
  // N = 3 with range max-1 = 1 cannot host a three-body string.
  CHECK(out.failures == 2);
  CHECK(t.number(0, "N") == 3);
  CHECK(t.number(0, "v") == 1.0);
  CHECK(t.text(0, "ansatz_label") == "full3_Rmax-1");
  CHECK(t.text(0, "error_flag") == "config");
  CHECK(std::isnan(t.number(0, "n_ex")));
  CHECK(t.text(1, "ansatz_label") == "none");
  CHECK(t.text(1, "error_flag") == "ok");
  CHECK(t.number(1, "t_c") == doctest::Approx(1.0));
  CHECK(t.text(6, "ansatz_label") == "full3_R2");
  CHECK(t.number(6, "N") == 4);
  CHECK(t.number(6, "n_ex") < t.number(7, "n_ex"));
}

TEST_CASE("identical results across thread counts") {
  Json doc{{"experiment", "kz_sweep"},
           {"model", {{"sizes", {3, 4}}}},
           {"protocol", {{"rates", {0.7, 3.0}}}},
           {"drivings", {{"exact", true}}},
           {"numerics", {{"output_points", 3}}}};
  const auto c = parse_config(doc);
  const int before = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::string one = run_kz_sweep(c).tables.front().to_csv();
  omp_set_num_threads(4);
  const std::string four = run_kz_sweep(c).tables.front().to_csv();
  omp_set_num_threads(before);
  CHECK(one == four);
}

TEST_CASE("written tables differ only in the timestamp") {
  const auto dir = std::filesystem::temp_directory_path() / "cdforge_harness_test";
  std::filesystem::remove_all(dir);
  Json doc{{"experiment", "state_prep"},
           {"model", {{"sizes", {3}}}},
           {"protocol", {{"tau", 1.0}}},
           {"ansatze", {{{"mode", "canonical"}, {"max_body", 3}, {"range", "max"}}}},
           {"numerics", {{"output_points", 5}}}};
  const auto c = parse_config(doc);
  RunOutput a = run_state_prep(c);
  write_tables(a, c, (dir / "a").string(), 1.0);
  RunOutput b = run_state_prep(c);
  write_tables(b, c, (dir / "b").string(), 2.0);
  REQUIRE(a.tables.size() == 2);  // series plus the amplitude flow of the ansatz run
  for (const auto& t : a.tables) {
    const std::string x = slurp(dir / "a" / (t.name + ".csv"));
    const std::string y = slurp(dir / "b" / (t.name + ".csv"));
    CHECK(x.rfind("# {", 0) == 0);
    CHECK(strip_metadata(x) == strip_metadata(y));
    Json mx = Json::parse(x.substr(2, x.find('\n') - 2));
    Json my = Json::parse(y.substr(2, y.find('\n') - 2));
    CHECK(mx["config"] == to_json(c));
    mx.erase("timestamp");
    my.erase("timestamp");
    CHECK(mx == my);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("state preparation starts in the ground state") {
  Json doc{{"experiment", "state_prep"},
           {"model", {{"sizes", {3}}}},
           {"protocol", {{"tau", 1.5}}},
           {"drivings", {{"bare", false}}},
           {"ansatze", {{{"mode", "canonical"}, {"max_body", 3}, {"range", 2}}}},
           {"numerics", {{"output_points", 7}}}};
  const auto out = run_state_prep(parse_config(doc));
  const ResultTable& s = out.tables.front();
  CHECK(s.number(0, "t") == 0.0);
  CHECK(s.number(0, "infidelity") < 1e-10);
  double worst = 0.0;
  for (std::size_t r = 0; r < s.rows.size(); ++r) worst = std::max(worst, s.number(r, "infidelity"));
  CHECK(worst < 1e-6);
  // t_c = 0.75 is on the uniform grid already: 7 points, no insertion.
  CHECK(s.rows.size() == 7);
}

TEST_CASE("single-point solve: zero rate, nearest-neighbor dominance, residual round trip") {
  Json doc{{"experiment", "solve_aux"}, {"point", {{"field", 1.0}, {"rate", 0.0}}}};
  auto out = solve_aux_once(parse_config(doc));
  const ResultTable& zero = out.tables[1];
  for (std::size_t r = 0; r < zero.rows.size(); ++r) CHECK(zero.number(r, "h_value") == 0.0);

  doc["point"]["rate"] = 1.0;
  out = solve_aux_once(parse_config(doc));
  const ResultTable& amps = out.tables[1];
  double near = 0.0;
  double far = 0.0;
  std::vector<PauliString> strings;
  RealVector h(static_cast<Eigen::Index>(amps.rows.size()));
  for (std::size_t r = 0; r < amps.rows.size(); ++r) {
    const PauliString p = PauliString::parse(amps.text(r, "string"));
    const double v = std::abs(amps.number(r, "h_value"));
    if (p.extent() == 1) near += v;
    if (p.extent() >= 3) far += v;
    strings.push_back(p);
    h(static_cast<Eigen::Index>(r)) = amps.number(r, "h_value");
  }
  CHECK(near > far);

  const IsingModel model{4, 1.0};
  const auto snap = diagonalize(model, 1.0);
  const OperatorBasis basis{strings, AnsatzSpec::two_body_yz(4), 4};
  const double back = residual(basis, h, adiabatic_state(snap, 0), aux_action(snap, field_derivative(model), 1.0, 0));
  CHECK(std::abs(back - out.tables[0].number(0, "residual")) < 1e-12);
}

TEST_CASE("resource table") {
  const auto out = resources(parse_config(Json{{"experiment", "resources"}, {"model", {{"sizes", {4}}}}}));
  const ResultTable& t = out.tables.front();
  REQUIRE(t.rows.size() == 4);
  CHECK(t.text(1, "count") == "96");
  CHECK(t.text(3, "count") == "3072");
}

TEST_CASE("tables refuse silent non-finite values") {
  ResultTable t;
  t.name = "x";
  t.columns = {"a"};
  t.add_row({std::numeric_limits<double>::quiet_NaN()});
  CHECK_THROWS_AS(t.to_csv(), ContractError);
  CHECK_THROWS_AS(t.add_row({1.0, 2.0}), ContractError);
  ResultTable flagged;
  flagged.columns = {"a", "error_flag"};
  flagged.add_row({std::numeric_limits<double>::quiet_NaN(), std::string("numeric")});
  CHECK(strip_metadata(flagged.to_csv()) == "a,error_flag\nnan,numeric\n");
}

TEST_CASE("csv formatting") {
  ResultTable t;
  t.columns = {"x", "label"};
  t.add_row({0.1, std::string("a,b")});
  t.add_row({1LL, std::string("plain")});
  CHECK(strip_metadata(t.to_csv()) == "x,label\n0.10000000000000001,\"a,b\"\n1,plain\n");
}
