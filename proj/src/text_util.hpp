#pragma once

// Helpers for the line-oriented `key=value key=value` data files.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bcst/error.hpp"

namespace bcst::detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::vector<std::string_view> split_lines(std::string_view text) { return split(text, '\n'); }

inline std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  return trim(line);
}

using Fields = std::map<std::string, std::string, std::less<>>;

inline Fields parse_fields(std::string_view line, std::size_t line_no) {
  Fields fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto start = line.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = line.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = line.size();
    const auto token = line.substr(start, end - start);
    const auto eq = token.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(ErrorCode::ParseError,
                  "expected key=value at line " + std::to_string(line_no) + ": " + std::string(token));
    }
    const auto [it, inserted] =
        fields.emplace(std::string(token.substr(0, eq)), std::string(token.substr(eq + 1)));
    if (!inserted) {
      throw Error(ErrorCode::ParseError, "repeated key '" + it->first + "' at line " +
                                             std::to_string(line_no));
    }
    pos = end;
  }
  return fields;
}

inline const std::string& require_field(const Fields& fields, std::string_view key,
                                        std::size_t line_no) {
  const auto it = fields.find(key);
  if (it == fields.end()) {
    throw Error(ErrorCode::ParseError,
                "missing '" + std::string(key) + "' at line " + std::to_string(line_no));
  }
  return it->second;
}

}  // namespace bcst::detail
