#pragma once

#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "springcurl/error.hpp"
#include "springcurl/stats/questionnaire.hpp"
#include "springcurl/subjects.hpp"

namespace springcurl {

inline constexpr std::string_view kTraitsHeader = "ID,FS,AC,CH,BO,CU,LOC";

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double likert_cell(const std::string& cell, const std::string& where) {
  std::vector<int> items;
  for (const auto& tok : split(cell, ';')) {
    const std::string t = trim(tok);
    try {
      std::size_t used = 0;
      items.push_back(std::stoi(t, &used));
      require(used == t.size(), ErrorCode::InvalidInput, "");
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidInput, where + ": bad Likert item '" + t + "'");
    }
  }
  return stats::normalize_likert(items);
}

}  // namespace detail

/// Raw questionnaire responses, one participant per line. Likert cells hold
/// the 7-point items separated by ';'; LOC is the raw 0..23 score.
inline std::map<std::string, TraitProfile> parse_traits_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::InvalidInput, "empty traits file");
  require(detail::trim(line) == kTraitsHeader, ErrorCode::SchemaMismatch,
          "traits header must be " + std::string(kTraitsHeader));
  std::map<std::string, TraitProfile> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    const std::string where = "traits line " + std::to_string(line_no);
    require(f.size() == 7, ErrorCode::InvalidInput, where + ": expected 7 fields");
    TraitProfile t;
    t.free_spirit = detail::likert_cell(f[1], where);
    t.achiever = detail::likert_cell(f[2], where);
    t.challenge = detail::likert_cell(f[3], where);
    t.boredom = detail::likert_cell(f[4], where);
    t.curiosity = detail::likert_cell(f[5], where);
    double loc = 0.0;
    try {
      loc = std::stod(detail::trim(f[6]));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidInput, where + ": bad LOC score");
    }
    t.locus_of_control = stats::loc_transform(loc);
    const std::string id = detail::trim(f[0]);
    require(!id.empty() && !out.count(id), ErrorCode::InvalidInput, where + ": missing or duplicate ID");
    out[id] = t;
  }
  return out;
}

}  // namespace springcurl
