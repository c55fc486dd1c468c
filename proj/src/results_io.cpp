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

#include "pgnc/results_io.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace pgnc {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header)
    : columns_(static_cast<int>(header.size())) {
  for (int i = 0; i < columns_; ++i) {
    if (i) body_ += ',';
    body_ += csv_escape(header[i]);
  }
  body_ += '\n';
}

CsvWriter& CsvWriter::cell(const std::string& s) { return cell_raw(csv_escape(s)); }

CsvWriter& CsvWriter::cell_raw(const std::string& s) {
  if (cells_in_row_ >= columns_)
    throw std::logic_error("csv: row has more cells than the header");
  if (cells_in_row_) body_ += ',';
  body_ += s;
  ++cells_in_row_;
  return *this;
}

void CsvWriter::end_row() {
  if (cells_in_row_ != columns_)
    throw std::logic_error("csv: row has fewer cells than the header");
  body_ += '\n';
  cells_in_row_ = 0;
  ++rows_;
}

const std::string& CsvWriter::str() const {
  if (cells_in_row_ != 0) throw std::logic_error("csv: unterminated row");
  return body_;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("io: cannot write '" + tmp + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("io: short write to '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("io: cannot open '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace pgnc
