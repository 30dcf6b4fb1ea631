/*
 * Copyright (C) 2026 The tcast Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// CSV reading/writing for series files.
//
// Input files carry a header of either `timestamp,counter` (raw SNMP polls)
// or `timestamp,bps` (already converted). `NaN` or an empty cell is missing.

#pragma once

#include <tcast/error.hpp>
#include <tcast/series.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tcast::io {

/// Shortest representation that round-trips exactly.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline bool is_missing_cell(const std::string& c) {
  return c.empty() || c == "NaN" || c == "nan" || c == "NAN";
}

inline std::int64_t parse_int(const std::string& c, std::size_t line_no) {
  std::int64_t v{};
  auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
  if (ec != std::errc{} || p != c.data() + c.size()) {
    // tolerate "1600000000.0" style timestamps
    double d{};
    auto [p2, ec2] = std::from_chars(c.data(), c.data() + c.size(), d);
    require(ec2 == std::errc{} && p2 == c.data() + c.size() && d == std::floor(d), Errc::MalformedInput,
            "line " + std::to_string(line_no) + ": not an integer: '" + c + "'");
    return static_cast<std::int64_t>(d);
  }
  return v;
}

inline double parse_double(const std::string& c, std::size_t line_no) {
  double v{};
  auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
  require(ec == std::errc{} && p == c.data() + c.size(), Errc::MalformedInput,
          "line " + std::to_string(line_no) + ": not a number: '" + c + "'");
  return v;
}

enum class InputKind { Counter, Bps };

struct ReadOptions {
  /// 0 = infer from the timestamps.
  std::int64_t interval = 0;
  IngestOptions ingest{};
};

struct RawTable {
  InputKind kind = InputKind::Bps;
  std::vector<std::int64_t> timestamps;
  std::vector<std::string> cells;
};

inline RawTable read_table(std::istream& in) {
  RawTable t;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (!header_seen) {
      require(cells.size() == 2 && cells[0] == "timestamp" && (cells[1] == "counter" || cells[1] == "bps"),
              Errc::MalformedInput, "expected header 'timestamp,counter' or 'timestamp,bps'");
      t.kind = cells[1] == "counter" ? InputKind::Counter : InputKind::Bps;
      header_seen = true;
      continue;
    }
    require(cells.size() == 2, Errc::MalformedInput, "line " + std::to_string(line_no) + ": expected 2 columns");
    t.timestamps.push_back(parse_int(cells[0], line_no));
    t.cells.push_back(cells[1]);
  }
  require(header_seen, Errc::EmptyInput, "input has no header");
  return t;
}

inline std::int64_t infer_interval(const std::vector<std::int64_t>& ts, std::int64_t requested) {
  if (requested > 0) return requested;
  if (ts.size() < 2) return kDefaultInterval;
  return ts[1] - ts[0];
}

inline TrafficSeries series_from_table(const RawTable& t, const ReadOptions& opts) {
  const std::int64_t interval = infer_interval(t.timestamps, opts.interval);
  require(interval > 0, Errc::MalformedInput, "non-positive sampling interval");

  if (t.kind == InputKind::Counter) {
    std::vector<CounterRecord> recs;
    recs.reserve(t.cells.size());
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
      CounterRecord r{t.timestamps[i], std::nullopt};
      if (!is_missing_cell(t.cells[i])) {
        const auto v = parse_int(t.cells[i], i + 2);
        require(v >= 0, Errc::MalformedInput, "negative counter at row " + std::to_string(i + 1));
        r.counter = static_cast<std::uint64_t>(v);
      }
      recs.push_back(r);
    }
    return ingest_counters(recs, interval, opts.ingest);
  }

  require(!t.cells.empty(), Errc::EmptyInput, "series file has no rows");
  TrafficSeries s;
  s.start_time = t.timestamps.front();
  s.interval = interval;
  for (std::size_t i = 0; i < t.cells.size(); ++i) {
    require(t.timestamps[i] == s.time_at(i), Errc::MalformedInput,
            "row " + std::to_string(i + 1) + " is off the uniform " + std::to_string(interval) + " s grid");
    if (is_missing_cell(t.cells[i])) {
      s.values.push_back(std::nan(""));
      s.missing.push_back(true);
    } else {
      s.values.push_back(parse_double(t.cells[i], i + 2));
      s.missing.push_back(false);
    }
  }
  return s;
}

inline TrafficSeries read_series(std::istream& in, const ReadOptions& opts = {}) {
  return series_from_table(read_table(in), opts);
}

inline TrafficSeries read_series_file(const std::string& path, const ReadOptions& opts = {}) {
  std::ifstream in(path);
  require(in.good(), Errc::IoError, "cannot open " + path);
  return read_series(in, opts);
}

/// `timestamp,bps` with missing values written as NaN.
inline void write_series(std::ostream& out, const TrafficSeries& s) {
  out << "timestamp,bps\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << s.time_at(i) << ',' << (s.missing[i] ? std::string("NaN") : fmt(s.values[i])) << '\n';
  }
}

/// Column-major table writer; every column must have the same length.
inline void write_columns(std::ostream& out, const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& cols) {
  require(header.size() == cols.size(), Errc::ShapeError, "header/column count mismatch");
  const std::size_t rows = cols.empty() ? 0 : cols.front().size();
  for (const auto& c : cols) require(c.size() == rows, Errc::ShapeError, "ragged columns");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << fmt(cols[j][i]);
    out << '\n';
  }
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Errc::IoError, "cannot write " + path);
  out << content;
  require(out.good(), Errc::IoError, "write failed for " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tcast::io
