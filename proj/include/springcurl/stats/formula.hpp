#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "springcurl/error.hpp"
#include "springcurl/stats/analysis_row.hpp"

namespace springcurl::stats {

struct Variable {
  std::string name;
  bool categorical = false;
  std::vector<std::string> levels;  ///< levels[0] is the treatment-coding reference
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<Variable> vars) : vars_(std::move(vars)) {}

  const Variable& at(std::string_view name) const {
    for (const auto& v : vars_) {
      if (v.name == name) return v;
    }
    fail(ErrorCode::ModelSpec, "unknown variable '" + std::string(name) + "'");
  }
  bool contains(std::string_view name) const {
    return std::any_of(vars_.begin(), vars_.end(), [&](const Variable& v) { return v.name == name; });
  }
  const std::vector<Variable>& variables() const { return vars_; }

 private:
  std::vector<Variable> vars_;
};

inline const Catalog& default_catalog() {
  static const Catalog catalog({
      {"SpringType", true, {"LS", "GS", "AGS"}},
      {"Condition", true, {"LS", "GS", "AGS"}},
      {"Stage", true, {"BL", "STR", "LTR"}},
      {"TrialNumber", false, {}},
      {"ShotNumber", false, {}},
      {"TransTask", false, {}},
      {"FS_c", false, {}},
      {"AC_c", false, {}},
      {"CH_c", false, {}},
      {"BO_c", false, {}},
      {"CU_c", false, {}},
      {"LOC_c", false, {}},
  });
  return catalog;
}

/// A model term: the product of its variables (one variable = main effect).
using Term = std::vector<std::string>;

struct ModelSpec {
  std::string name;
  std::string response;
  std::vector<Term> terms;
  bool intercept = true;
  std::string group = "ID";
};

namespace detail {

using TermSet = std::vector<Term>;

inline void add_unique(TermSet& set, const Term& t) {
  if (std::find(set.begin(), set.end(), t) == set.end()) set.push_back(t);
}

inline Term merge_terms(const Term& a, const Term& b) {
  Term out = a;
  for (const auto& v : b) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

inline TermSet interact(const TermSet& a, const TermSet& b) {
  TermSet out;
  for (const auto& x : a) {
    for (const auto& y : b) add_unique(out, merge_terms(x, y));
  }
  return out;
}

inline TermSet cross(const TermSet& a, const TermSet& b) {
  TermSet out = a;
  for (const auto& t : b) add_unique(out, t);
  for (const auto& t : interact(a, b)) add_unique(out, t);
  return out;
}

/// Recursive-descent parser for the right-hand side of R-style formulas:
/// `+` (union), `*` (crossing), `:` (interaction), parentheses.
class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  TermSet parse() {
    TermSet out = sum();
    skip_ws();
    require(pos_ == text_.size(), ErrorCode::ModelSpec,
            "unexpected '" + std::string(text_.substr(pos_)) + "' in formula");
    return out;
  }

 private:
  TermSet sum() {
    TermSet out = product();
    while (consume('+')) {
      for (const auto& t : product()) add_unique(out, t);
    }
    return out;
  }

  TermSet product() {
    TermSet out = interaction();
    while (consume('*')) out = cross(out, interaction());
    return out;
  }

  TermSet interaction() {
    TermSet out = atom();
    while (consume(':')) out = interact(out, atom());
    return out;
  }

  TermSet atom() {
    skip_ws();
    if (consume('(')) {
      TermSet inner = sum();
      require(consume(')'), ErrorCode::ModelSpec, "missing ')' in formula");
      return inner;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    require(pos_ > start, ErrorCode::ModelSpec, "expected a variable name in formula");
    return {Term{std::string(text_.substr(start, pos_ - start))}};
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

/// Expands a right-hand side such as `SpringType*TrialNumber*(FS_c+CH_c)`.
/// Terms come back ordered by degree, then by first appearance.
inline std::vector<Term> expand_terms(std::string_view rhs) {
  auto terms = detail::FormulaParser(rhs).parse();
  terms.erase(std::remove(terms.begin(), terms.end(), Term{"1"}), terms.end());
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.size() < b.size(); });
  return terms;
}

/// Parses `response ~ rhs + (1|group)`; the random-intercept part is required.
inline ModelSpec parse_model(std::string_view formula, std::string name = {}) {
  const auto tilde = formula.find('~');
  require(tilde != std::string_view::npos, ErrorCode::ModelSpec, "formula needs '~'");
  ModelSpec spec;
  spec.name = std::move(name);
  spec.response = detail::trim(formula.substr(0, tilde));
  std::string rhs(formula.substr(tilde + 1));
  const auto open = rhs.find("(1|");
  require(open != std::string::npos, ErrorCode::ModelSpec,
          "formula needs a random intercept '(1|group)'");
  const auto close = rhs.find(')', open);
  require(close != std::string::npos, ErrorCode::ModelSpec, "unterminated random term");
  spec.group = detail::trim(std::string_view(rhs).substr(open + 3, close - open - 3));
  rhs.erase(open, close - open + 1);
  // Drop the '+' that joined the random term.
  auto plus = rhs.find_last_not_of(" \t", open == 0 ? 0 : open - 1);
  if (open > 0 && plus != std::string::npos && rhs[plus] == '+') rhs.erase(plus, 1);
  spec.terms = expand_terms(rhs);
  return spec;
}

using CovariateValue = std::variant<double, std::string>;
using CovariatePoint = std::map<std::string, CovariateValue>;

/// Treatment-coded design columns for a model's fixed effects.
class DesignEncoder {
 public:
  struct Factor {
    std::string variable;
    std::string level;  ///< empty for numeric variables
  };

  DesignEncoder(const ModelSpec& spec, const Catalog& catalog) : catalog_(catalog) {
    if (spec.intercept) {
      names_.push_back("(Intercept)");
      columns_.push_back({});
    }
    for (const Term& term : spec.terms) {
      std::vector<std::vector<Factor>> partial{{}};
      for (const auto& var_name : term) {
        const Variable& var = catalog.at(var_name);
        std::vector<std::vector<Factor>> next;
        for (const auto& prefix : partial) {
          if (var.categorical) {
            for (std::size_t l = 1; l < var.levels.size(); ++l) {
              auto f = prefix;
              f.push_back({var.name, var.levels[l]});
              next.push_back(std::move(f));
            }
          } else {
            auto f = prefix;
            f.push_back({var.name, {}});
            next.push_back(std::move(f));
          }
        }
        partial = std::move(next);
      }
      for (auto& factors : partial) {
        std::string name;
        for (const auto& f : factors) {
          if (!name.empty()) name += ':';
          name += f.variable + f.level;
        }
        names_.push_back(std::move(name));
        columns_.push_back(std::move(factors));
      }
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  std::vector<double> encode(const AnalysisRow& row) const {
    std::vector<double> out(columns_.size(), 1.0);
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      for (const auto& f : columns_[c]) {
        if (f.level.empty()) {
          const auto v = numeric_value(row, f.variable);
          require(v.has_value(), ErrorCode::ModelSpec, "'" + f.variable + "' is not numeric");
          out[c] *= *v;
        } else {
          const auto v = level_value(row, f.variable);
          require(v.has_value(), ErrorCode::ModelSpec, "'" + f.variable + "' is not categorical");
          check_level(f.variable, *v);
          out[c] *= (*v == f.level) ? 1.0 : 0.0;
        }
      }
    }
    return out;
  }

  /// Row for a covariate point; absent numerics are 0 and absent factors sit
  /// at their reference level.
  std::vector<double> encode(const CovariatePoint& point) const {
    for (const auto& [name, value] : point) {
      const Variable& var = catalog_.at(name);
      if (var.categorical) {
        const auto* level = std::get_if<std::string>(&value);
        require(level != nullptr, ErrorCode::InvalidInput, "'" + name + "' expects a level");
        check_level(name, *level);
      } else {
        require(std::holds_alternative<double>(value), ErrorCode::InvalidInput,
                "'" + name + "' expects a number");
      }
    }
    std::vector<double> out(columns_.size(), 1.0);
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      for (const auto& f : columns_[c]) {
        const auto it = point.find(f.variable);
        if (f.level.empty()) {
          out[c] *= it == point.end() ? 0.0 : std::get<double>(it->second);
        } else {
          const std::string level = it == point.end() ? catalog_.at(f.variable).levels.front()
                                                      : std::get<std::string>(it->second);
          out[c] *= level == f.level ? 1.0 : 0.0;
        }
      }
    }
    return out;
  }

 private:
  void check_level(const std::string& variable, const std::string& level) const {
    const auto& levels = catalog_.at(variable).levels;
    require(std::find(levels.begin(), levels.end(), level) != levels.end(),
            ErrorCode::InvalidInput, "unknown level '" + level + "' for " + variable);
  }

  Catalog catalog_;
  std::vector<std::string> names_;
  std::vector<std::vector<Factor>> columns_;
};

}  // namespace springcurl::stats
