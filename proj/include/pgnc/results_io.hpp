// Copyright 2026 The pgnc Authors
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

#include <cstdio>
#include <string>
#include <vector>

namespace pgnc {

inline constexpr int kResultsSchemaVersion = 1;

// Round-trip exact float formatting shared by all result files.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// RFC-4180-style CSV with a header row and a stable column order.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double x) { return cell_raw(format_double(x)); }
  CsvWriter& cell(int x) { return cell_raw(std::to_string(x)); }
  CsvWriter& cell(long x) { return cell_raw(std::to_string(x)); }
  CsvWriter& cell(std::uint64_t x) { return cell_raw(std::to_string(x)); }
  void end_row();

  int rows() const { return rows_; }
  const std::string& str() const;

 private:
  CsvWriter& cell_raw(const std::string& s);

  std::string body_;
  int columns_ = 0;
  int cells_in_row_ = 0;
  int rows_ = 0;
};

// Writes via a temp file and rename so readers never observe partial output.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace pgnc
