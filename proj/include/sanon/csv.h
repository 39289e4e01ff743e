// Copyright (c) 2026 The sanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SANON_CSV_H_
#define SANON_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sanon {

// Minimal comma-separated reader for the project's flat schemas. Fields are
// not quoted; ids and paths must not contain commas.
struct CsvRow {
  int line = 0;  // 1-based line number in the source file
  std::vector<std::string> fields;
};

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

std::vector<std::string> SplitCsvLine(std::string_view line);
CsvDocument ReadCsv(const std::filesystem::path& path);
std::string JoinCsv(const std::vector<std::string>& fields);

// Strict numeric parse of a whole cell; returns false on trailing garbage.
bool ParseDouble(std::string_view text, double* value);

}  // namespace sanon

#endif  // SANON_CSV_H_
