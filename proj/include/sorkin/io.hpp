// Copyright 2026 The sorkin-sim Authors
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

// Output files. Every file starts with its schema version; CSV files carry
// metadata as "# key: value" lines, JSON files as top-level fields. The
// "created" timestamp is the only field that varies between identical runs.

#ifndef SORKIN_IO_HPP_
#define SORKIN_IO_HPP_

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sorkin/common.hpp"
#include "sorkin/config.hpp"
#include "sorkin/fock.hpp"
#include "sorkin/interference.hpp"

namespace sorkin::io {

using config::json;

class IoError : public Error {
 public:
  using Error::Error;
};

/// %.17g, which round-trips every double; -0 prints as 0.
inline std::string num(double v) {
  if (v == 0) v = 0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Writes to a sibling temporary and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed for " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Column-oriented table with string cells (numbers already formatted).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// `meta` must hold "schema_version" and "created"; they are written first.
inline std::string to_csv(const json& meta, const Table& t) {
  std::string out = "# schema_version: " + meta.at("schema_version").dump() + "\n";
  out += "# created: " + meta.at("created").get<std::string>() + "\n";
  for (auto it = meta.begin(); it != meta.end(); ++it) {
    if (it.key() == "schema_version" || it.key() == "created") continue;
    out += "# " + it.key() + ": " + (it->is_string() ? it->get<std::string>() : it->dump()) + "\n";
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += '\n';
  }
  return out;
}

/// Cells that parse as numbers are emitted as JSON numbers.
inline std::string to_json_text(json meta, const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (const auto& cell : r) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (!cell.empty() && end == cell.c_str() + cell.size() && std::isfinite(v)) {
        row.push_back(v);
      } else {
        row.push_back(cell);
      }
    }
    rows.push_back(std::move(row));
  }
  meta["columns"] = t.columns;
  meta["rows"] = std::move(rows);
  return meta.dump(2) + "\n";
}

/// pattern (mode 0 first), blocked-path count, intensity.
inline Table intensity_table_rows(const IntensityTable& table) {
  Table t{{"pattern", "blocked", "intensity"}, {}};
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto p = BlockPattern::from_index(table.mode_count(), i);
    t.rows.push_back({p.to_string(), std::to_string(p.blocked_count()), num(table.at(i))});
  }
  return t;
}

inline json to_json(const IntensityTable& table) {
  json j = json::object();
  for (std::size_t i = 0; i < table.size(); ++i) {
    j[BlockPattern::from_index(table.mode_count(), i).to_string()] = table.at(i);
  }
  return j;
}

}  // namespace sorkin::io

#endif  // SORKIN_IO_HPP_
