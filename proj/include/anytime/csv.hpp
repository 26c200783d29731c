// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace anytime {

// Minimal comma-separated tables: a header row, no quoting, surrounding
// whitespace trimmed. Blank lines and lines starting with '#' are skipped.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based line of each row

  // Index of `name` in the header; throws ParseError if absent.
  std::size_t column(std::string_view name) const;
  double real(std::size_t row, std::size_t col) const;
  std::size_t count(std::size_t row, std::size_t col) const;
};

CsvTable parse_csv(std::string_view text, const std::string& source);
CsvTable read_csv(const std::string& path);

// Appends one row. Throws ParseError if a field would need quoting.
void append_csv_row(std::string& out, const std::vector<std::string>& fields);

}  // namespace anytime
