#pragma once

#include <cmath>
#include <cstdio>
#include <span>
#include <string>

#include <json.hpp>

#include "springcurl/stats/lmm.hpp"

namespace springcurl::stats {

namespace detail {

inline std::string cell(const char* fmt, double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

}  // namespace detail

/// Coefficient table: estimate, SE, t, p, Holm-p.
inline std::string format_fit(const LmmFit& fit) {
  std::size_t name_w = 12;
  for (const auto& c : fit.columns) name_w = std::max(name_w, c.size() + 2);
  std::string out;
  out += fit.spec.name.empty() ? fit.spec.response : fit.spec.name + " (" + fit.spec.response + ")";
  out += "\n";
  out += detail::pad("term", name_w, true) + detail::pad("estimate", 12) + detail::pad("se", 12) +
         detail::pad("t", 10) + detail::pad("p", 11) + detail::pad("holm_p", 11) + "\n";
  for (std::size_t j = 0; j < fit.columns.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    out += detail::pad(fit.columns[j], name_w, true) + detail::pad(detail::cell("%.5f", fit.beta(i)), 12) +
           detail::pad(detail::cell("%.5f", fit.se(i)), 12) +
           detail::pad(detail::cell("%.3f", fit.t_values(i)), 10) +
           detail::pad(detail::cell("%.3g", fit.p_values(i)), 11) +
           detail::pad(detail::cell("%.3g", fit.p_holm(i)), 11) + "\n";
  }
  char tail[256];
  std::snprintf(tail, sizeof tail,
                "sigma_b^2 = %.6g  sigma_e^2 = %.6g  logLik = %.4f  AIC = %.4f  BIC = %.4f  n = %zu  groups = %zu\n",
                fit.sigma_b2, fit.sigma_e2, fit.log_lik, fit.aic, fit.bic, fit.n_obs, fit.n_groups);
  out += tail;
  for (const auto& w : fit.warnings) out += "warning: " + w + "\n";
  return out;
}

inline std::string format_ranking(std::span<const ModelRanking> table) {
  std::size_t name_w = 10;
  for (const auto& r : table) name_w = std::max(name_w, r.name.size() + 2);
  std::string out = detail::pad("model", name_w, true) + detail::pad("k", 5) + detail::pad("logLik", 14) +
                    detail::pad("AIC", 14) + detail::pad("BIC", 14) + detail::pad("dAIC", 11) +
                    detail::pad("dBIC", 11) + "\n";
  for (const auto& r : table) {
    out += detail::pad(r.name, name_w, true) + detail::pad(std::to_string(r.n_params), 5) +
           detail::pad(detail::cell("%.3f", r.log_lik), 14) + detail::pad(detail::cell("%.3f", r.aic), 14) +
           detail::pad(detail::cell("%.3f", r.bic), 14) + detail::pad(detail::cell("%.3f", r.delta_aic), 11) +
           detail::pad(detail::cell("%.3f", r.delta_bic), 11) + "\n";
  }
  return out;
}

inline nlohmann::json fit_to_json(const LmmFit& fit) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t j = 0; j < fit.columns.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    terms.push_back({{"term", fit.columns[j]},
                     {"estimate", num(fit.beta(i))},
                     {"se", num(fit.se(i))},
                     {"t", num(fit.t_values(i))},
                     {"p", num(fit.p_values(i))},
                     {"holm_p", num(fit.p_holm(i))}});
  }
  return {{"model", fit.spec.name},
          {"response", fit.spec.response},
          {"terms", terms},
          {"sigma_b2", fit.sigma_b2},
          {"sigma_e2", fit.sigma_e2},
          {"log_lik", fit.log_lik},
          {"aic", fit.aic},
          {"bic", fit.bic},
          {"n_obs", fit.n_obs},
          {"n_groups", fit.n_groups},
          {"n_params", fit.n_params},
          {"warnings", fit.warnings}};
}

}  // namespace springcurl::stats
