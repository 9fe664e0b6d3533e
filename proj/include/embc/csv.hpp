// Copyright 2026 The embc Authors
// SPDX-License-Identifier: Apache-2.0
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

#include <charconv>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "embc/errors.hpp"

namespace embc {

namespace detail {

/// Shortest round-trip decimal form, always '.' as the decimal separator.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("double formatting failed");
  return std::string(buf, ptr);
}

}  // namespace detail

/// Comma-separated writer. The first line names the schema (as a comment),
/// the second is the header row; fields never contain commas or quotes.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& schema, const std::vector<std::string>& columns)
      : out_(out), column_count_(columns.size()) {
    out_ << "# schema: " << schema << "\n";
    write_row(columns);
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != column_count_) {
      throw Error("csv row has " + std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(column_count_));
    }
    write_row(fields);
  }

  static std::string num(double v) { return detail::format_double(v); }
  static std::string num(uint64_t v) { return std::to_string(v); }

 private:
  void write_row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  std::ostream& out_;
  size_t column_count_;
};

struct CsvTable {
  std::string schema;  // empty when the file has no schema comment
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# schema: ";
      if (line.rfind(tag, 0) == 0) table.schema = line.substr(tag.size());
      continue;
    }
    std::vector<std::string> fields;
    size_t start = 0;
    for (;;) {
      const size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (!header_seen) {
      table.header = std::move(fields);
      header_seen = true;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

inline CsvTable parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open csv file '" + path + "'");
  return parse_csv(in);
}

}  // namespace embc
