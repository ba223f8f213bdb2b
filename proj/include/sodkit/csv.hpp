// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sodkit Authors

#pragma once

// Box lists and score matrices as CSV.
//   boxes:  header "x1,y1,x2,y2", then one box per line
//   scores: header "gt,p0,p1,...", then one row per GT

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sodkit/error.hpp"
#include "sodkit/geometry.hpp"
#include "sodkit/matrix.hpp"
#include "sodkit/report_text.hpp"

namespace sodkit {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace detail

/// Parses a box list. `what` prefixes error messages (usually the path).
inline std::vector<Box> parse_box_csv(std::string_view text, std::string_view what = "boxes") {
  const std::string ctx(what);
  std::vector<Box> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = detail::trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto fields = detail::split_commas(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() == 4 && fields[0] == "x1" && fields[1] == "y1" && fields[2] == "x2" &&
          fields[3] == "y2") {
        continue;
      }
      throw FormatError(ctx + ":" + std::to_string(line_no) + ": expected header x1,y1,x2,y2");
    }
    if (fields.size() != 4) {
      throw FormatError(ctx + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    }
    double v[4];
    for (int k = 0; k < 4; ++k) {
      if (!detail::parse_double(fields[static_cast<std::size_t>(k)], v[k])) {
        throw FormatError(ctx + ":" + std::to_string(line_no) + ": bad number '" +
                          std::string(fields[static_cast<std::size_t>(k)]) + "'");
      }
    }
    const Box b{v[0], v[1], v[2], v[3]};
    if (!is_valid(b)) {
      throw FormatError(ctx + ":" + std::to_string(line_no) + ": invalid box (need x2>=x1, y2>=y1)");
    }
    out.push_back(b);
    if (end == text.size()) break;
  }
  if (!header_seen) throw FormatError(ctx + ": empty file");
  if (out.empty()) throw FormatError(ctx + ": no boxes");
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<Box> read_box_csv(const std::string& path) {
  return parse_box_csv(read_text_file(path), path);
}

inline std::string box_csv(std::span<const Box> boxes) {
  std::string out = "x1,y1,x2,y2\n";
  for (const auto& b : boxes) {
    out += format_number(b.x1) + ',' + format_number(b.y1) + ',' + format_number(b.x2) + ',' +
           format_number(b.y2) + '\n';
  }
  return out;
}

inline std::string score_matrix_csv(const ScoreMatrix& s) {
  std::string out = "gt";
  for (std::size_t j = 0; j < s.cols(); ++j) out += ",p" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < s.rows(); ++i) {
    out += std::to_string(i);
    for (std::size_t j = 0; j < s.cols(); ++j) out += ',' + format_number(s(i, j));
    out += '\n';
  }
  return out;
}

/// Inverse of score_matrix_csv.
inline ScoreMatrix parse_score_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t cols = 0, line_no = 0, start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = detail::trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_commas(line);
    if (line_no == 1) {
      if (fields.empty() || fields[0] != "gt") throw FormatError("scores:1: expected header");
      cols = fields.size() - 1;
      continue;
    }
    if (fields.size() != cols + 1) {
      throw FormatError("scores:" + std::to_string(line_no) + ": wrong field count");
    }
    std::vector<double> row(cols);
    for (std::size_t j = 0; j < cols; ++j) {
      if (!detail::parse_double(fields[j + 1], row[j])) {
        throw FormatError("scores:" + std::to_string(line_no) + ": bad number");
      }
    }
    rows.push_back(std::move(row));
  }
  ScoreMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace sodkit
