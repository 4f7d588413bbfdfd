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
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cdforge/harness.hpp"

namespace cdforge {
namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string render(const Cell& cell) {
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  return quote(std::get<std::string>(cell));
}

}  // namespace

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw ContractError("row of " + std::to_string(row.size()) + " cells for " +
                        std::to_string(columns.size()) + " columns in table " + name);
  }
  rows.push_back(std::move(row));
}

std::size_t ResultTable::column(const std::string& col) const {
  const auto it = std::find(columns.begin(), columns.end(), col);
  if (it == columns.end()) throw ContractError("table " + name + " has no column " + col);
  return static_cast<std::size_t>(it - columns.begin());
}

double ResultTable::number(std::size_t row, const std::string& col) const {
  const Cell& cell = rows.at(row).at(column(col));
  if (const auto* i = std::get_if<long long>(&cell)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  throw ContractError("column " + col + " is not numeric");
}

const std::string& ResultTable::text(std::size_t row, const std::string& col) const {
  const Cell& cell = rows.at(row).at(column(col));
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  throw ContractError("column " + col + " is not text");
}

std::string ResultTable::to_csv() const {
  const bool flagged = std::find(columns.begin(), columns.end(), "error_flag") != columns.end();
  std::string out = "# " + metadata.dump() + "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto* d = std::get_if<double>(&row[c]);
      if (d && !std::isfinite(*d) && !flagged) {
        throw ContractError("non-finite value in column " + columns[c] + " of unflagged table " + name);
      }
      if (c) out += ',';
      out += render(row[c]);
    }
    out += "\n";
  }
  return out;
}

void ResultTable::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / (name + ".csv");
  const std::string body = to_csv();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path.string());
  out << body;
  if (!out) throw ResourceError("write failed for " + path.string());
}

}  // namespace cdforge
