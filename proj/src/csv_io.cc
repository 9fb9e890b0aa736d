// Copyright 2026 The fedstab Authors. All Rights Reserved.
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
// =============================================================================

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "fedstab/data.h"
#include "fedstab/errors.h"
#include "fedstab/text.h"

namespace fedstab {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void save_csv(const GlobalDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "# num_classes=" << dataset.num_classes << "\n";
  out << "# tag=" << dataset.distribution_tag << "\n";
  const std::size_t d = dataset.feature_dim();
  for (std::size_t k = 0; k < d; ++k) out << 'f' << k << ',';
  out << "label\n";
  for (const auto& ex : dataset.examples) {
    for (double v : ex.features) out << format_double(v) << ',';
    out << format_double(ex.label) << '\n';
  }
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

GlobalDataset load_csv(const std::string& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");

  GlobalDataset dataset;
  std::optional<std::size_t> declared_classes;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key == "num_classes") {
        std::size_t parsed = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
          throw ParseError(path + ":" + std::to_string(line_no) + ": bad num_classes '" + value + "'");
        }
        declared_classes = parsed;
      } else if (key == "tag") {
        dataset.distribution_tag = value;
      }
      continue;
    }
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw ParseError(path + ": empty file (no header row)");
  if (header.size() < 2) throw ParseError(path + ":" + std::to_string(line_no) + ": header needs at least one feature column and a label column");
  if (header.back() != "label") {
    throw ParseError(path + ":" + std::to_string(line_no) + ": last column must be 'label', found '" +
                     header.back() + "'");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (trim(header[k]).empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": feature column " +
                       std::to_string(k) + " has an empty name");
    }
  }
  if (expected_dim && *expected_dim != d) {
    const std::string column = d > *expected_dim ? header[*expected_dim]
                                                 : "f" + std::to_string(d);
    throw ParseError(path + ":" + std::to_string(line_no) + ": header declares " +
                     std::to_string(d) + " feature columns, expected " +
                     std::to_string(*expected_dim) + " (column '" + column + "')");
  }

  bool integral_labels = true;
  double max_label = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    Example ex;
    ex.features.resize(d);
    for (std::size_t k = 0; k <= d; ++k) {
      double value = 0.0;
      if (!parse_double(fields[k], value)) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": column '" + header[k] +
                         "': cannot parse '" + fields[k] + "'");
      }
      if (k < d) {
        ex.features[k] = value;
      } else {
        ex.label = value;
      }
    }
    if (ex.label < 0.0 || ex.label != std::floor(ex.label)) integral_labels = false;
    max_label = std::max(max_label, ex.label);
    dataset.examples.push_back(std::move(ex));
  }
  if (dataset.examples.empty()) throw ParseError(path + ": no data rows");
  if (declared_classes) {
    dataset.num_classes = *declared_classes;
  } else {
    dataset.num_classes = integral_labels ? static_cast<std::size_t>(max_label) + 1 : 0;
  }
  return dataset;
}

}  // namespace fedstab
