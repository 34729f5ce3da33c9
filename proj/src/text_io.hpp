// Copyright 2026 The BankFair Authors
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

// Row readers shared by the dataset loaders. Internal to the library.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bankfair/domain.hpp"

namespace bankfair::detail {

struct Record {
  std::size_t line;
  std::vector<std::string> fields;  // required columns, then optional ones ("" if absent)
};

inline bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

inline std::string json_field_text(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_float()) return format_double(value.get<double>());
  if (value.is_number()) return value.dump();
  throw std::invalid_argument("expected string or number");
}

inline void for_each_record(const std::filesystem::path& path, FileFormat format,
                            const std::vector<std::string>& required,
                            const std::vector<std::string>& optional,
                            const std::function<void(const Record&)>& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::vector<std::string> names = required;
  names.insert(names.end(), optional.begin(), optional.end());

  std::string line;
  std::size_t line_no = 0;
  std::vector<int> column;  // csv: position of each named column, -1 if absent
  std::size_t width = 0;
  Record record;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    record.line = line_no;
    record.fields.assign(names.size(), std::string());
    if (format == FileFormat::csv) {
      auto cells = split_csv(line);
      if (column.empty()) {
        if (cells[0].rfind("\xEF\xBB\xBF", 0) == 0) cells[0].erase(0, 3);  // UTF-8 BOM
        for (const auto& name : names) {
          auto it = std::find(cells.begin(), cells.end(), name);
          column.push_back(it == cells.end() ? -1 : static_cast<int>(it - cells.begin()));
        }
        for (std::size_t k = 0; k < required.size(); ++k) {
          if (column[k] < 0) throw ParseError("missing column '" + required[k] + "' in header", line_no);
        }
        width = cells.size();
        continue;
      }
      if (cells.size() != width) {
        throw ParseError("expected " + std::to_string(width) + " fields, found " +
                             std::to_string(cells.size()),
                         line_no);
      }
      for (std::size_t k = 0; k < names.size(); ++k) {
        if (column[k] >= 0) record.fields[k] = cells[static_cast<std::size_t>(column[k])];
      }
      for (std::size_t k = 0; k < required.size(); ++k) {
        if (record.fields[k].empty()) throw ParseError("empty field '" + required[k] + "'", line_no);
      }
    } else {
      nlohmann::json row;
      try {
        row = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
      }
      if (!row.is_object()) throw ParseError("expected a JSON object", line_no);
      for (std::size_t k = 0; k < names.size(); ++k) {
        auto it = row.find(names[k]);
        if (it == row.end()) {
          if (k < required.size()) throw ParseError("missing field '" + names[k] + "'", line_no);
          continue;
        }
        try {
          record.fields[k] = json_field_text(*it);
        } catch (const std::invalid_argument&) {
          throw ParseError("field '" + names[k] + "' must be a string or number", line_no);
        }
      }
    }
    sink(record);
  }
}

}  // namespace bankfair::detail
