#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "springcurl/error.hpp"
#include "springcurl/roots.hpp"
#include "springcurl/stats/analysis_row.hpp"
#include "springcurl/stats/formula.hpp"
#include "springcurl/stats/holm.hpp"

namespace springcurl::stats {

inline constexpr double kVarianceFloor = 1e-12;
inline constexpr double kZ975 = 1.959963984540054;

struct LmmFit {
  ModelSpec spec;
  std::vector<std::string> columns;
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  Eigen::VectorXd t_values;
  Eigen::VectorXd p_values;
  Eigen::VectorXd p_holm;  ///< Holm over non-intercept terms; NaN for the intercept
  Eigen::MatrixXd covariance;
  double sigma_b2 = 0.0;
  double sigma_e2 = 0.0;
  double lambda = 0.0;
  double log_lik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t n_obs = 0;
  std::size_t n_groups = 0;
  std::size_t n_params = 0;
  double df_resid = 0.0;
  std::uint64_t dataset_fingerprint = 0;
  std::vector<std::string> warnings;
};

inline double aic_of(double log_lik, std::size_t k) { return 2.0 * static_cast<double>(k) - 2.0 * log_lik; }
inline double bic_of(double log_lik, std::size_t k, std::size_t n) {
  return static_cast<double>(k) * std::log(static_cast<double>(n)) - 2.0 * log_lik;
}

/// FNV-1a over participant ids and responses; fits compared together must agree.
inline std::uint64_t dataset_fingerprint(std::span<const AnalysisRow> rows) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& r : rows) {
    mix(r.participant_id.data(), r.participant_id.size());
    mix("\x1f", 1);
    mix(&r.value, sizeof r.value);
  }
  return h;
}

/// Encoded design and grouping, reusable across refits with new responses.
class LmmProblem {
 public:
  struct Profile {
    double lambda = 0.0;
    double log_lik = 0.0;
    double sigma_e2 = 0.0;
    bool floored = false;
    Eigen::VectorXd beta;
    Eigen::MatrixXd a_inverse;
  };

  LmmProblem(ModelSpec spec, std::span<const AnalysisRow> rows,
             const Catalog& catalog = default_catalog())
      : spec_(std::move(spec)) {
    require(spec_.group == "ID", ErrorCode::ModelSpec,
            "random intercept must group by participant (ID)");
    require(!rows.empty(), ErrorCode::InvalidInput, "no rows to fit");
    DesignEncoder encoder(spec_, catalog);
    columns_ = encoder.names();
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(columns_.size());
    x_.resize(n, p);
    y_.resize(n);
    group_.resize(rows.size());
    std::map<std::string, std::size_t> ids;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      const auto enc = encoder.encode(row);
      for (Eigen::Index j = 0; j < p; ++j) x_(i, j) = enc[static_cast<std::size_t>(j)];
      y_(i) = row.value;
      const auto [it, inserted] = ids.emplace(row.participant_id, ids.size());
      group_[static_cast<std::size_t>(i)] = it->second;
    }
    n_groups_ = ids.size();
    require(n_groups_ >= 2, ErrorCode::InvalidInput, "need at least 2 participants");
    check_rank();

    group_size_.assign(n_groups_, 0.0);
    group_x_sum_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_groups_), p);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto g = static_cast<Eigen::Index>(group_[static_cast<std::size_t>(i)]);
      group_size_[static_cast<std::size_t>(g)] += 1.0;
      group_x_sum_.row(g) += x_.row(i);
    }
    xtx_ = x_.transpose() * x_;
    fingerprint_ = dataset_fingerprint(rows);
  }

  const ModelSpec& spec() const { return spec_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const Eigen::MatrixXd& design() const { return x_; }
  const Eigen::VectorXd& response() const { return y_; }
  const std::vector<std::size_t>& groups() const { return group_; }
  std::size_t n_obs() const { return static_cast<std::size_t>(y_.size()); }
  std::size_t n_groups() const { return n_groups_; }

  /// GLS solution and profiled ML log-likelihood at a fixed variance ratio.
  Profile profile(double lambda, const Eigen::VectorXd& y) const {
    require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::InvalidInput,
            "variance ratio must be finite and >= 0");
    const auto p = x_.cols();
    Eigen::VectorXd group_y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_groups_));
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      group_y(static_cast<Eigen::Index>(group_[static_cast<std::size_t>(i)])) += y(i);
    }
    Eigen::MatrixXd a = xtx_;
    Eigen::VectorXd b = x_.transpose() * y;
    double log_det = 0.0;
    std::vector<double> shrink(n_groups_);
    for (std::size_t g = 0; g < n_groups_; ++g) {
      const double c = lambda / (1.0 + lambda * group_size_[g]);
      shrink[g] = c;
      log_det += std::log1p(lambda * group_size_[g]);
      const auto gi = static_cast<Eigen::Index>(g);
      const Eigen::VectorXd s = group_x_sum_.row(gi).transpose();
      a.noalias() -= c * s * s.transpose();
      b.noalias() -= c * group_y(gi) * s;
    }
    Profile out;
    out.lambda = lambda;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    out.beta = ldlt.solve(b);
    out.a_inverse = ldlt.solve(Eigen::MatrixXd::Identity(p, p));

    const Eigen::VectorXd r = y - x_ * out.beta;
    Eigen::VectorXd group_r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_groups_));
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      group_r(static_cast<Eigen::Index>(group_[static_cast<std::size_t>(i)])) += r(i);
    }
    double rss = r.squaredNorm();
    for (std::size_t g = 0; g < n_groups_; ++g) {
      const double sg = group_r(static_cast<Eigen::Index>(g));
      rss -= shrink[g] * sg * sg;
    }
    const double n = static_cast<double>(y.size());
    out.sigma_e2 = rss / n;
    if (!(out.sigma_e2 > kVarianceFloor)) {
      out.sigma_e2 = kVarianceFloor;
      out.floored = true;
    }
    constexpr double two_pi = 6.283185307179586;
    out.log_lik = -0.5 * n * (std::log(two_pi * out.sigma_e2) + 1.0) - 0.5 * log_det;
    return out;
  }

  Profile profile(double lambda) const { return profile(lambda, y_); }

  /// Maximizes the profiled likelihood over lambda: a log-spaced scan from
  /// 1e-8 to 1e8 plus lambda = 0, refined by golden section.
  Profile maximize(const Eigen::VectorXd& y) const {
    std::vector<double> grid{0.0};
    for (int k = -80; k <= 80; ++k) grid.push_back(std::pow(10.0, k / 10.0));
    std::size_t best = 0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double ll = profile(grid[i], y).log_lik;
      if (ll > best_ll) {
        best_ll = ll;
        best = i;
      }
    }
    const double lo = best == 0 ? 0.0 : grid[best - 1];
    const double hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
    double lambda = grid[best];
    if (hi > lo) {
      const double tol = 1e-10 * std::max(1.0, lambda);
      lambda = roots::golden_maximize([&](double l) { return profile(l, y).log_lik; }, lo, hi, tol);
    }
    Profile refined = profile(lambda, y);
    // The boundary is not reachable by golden section; check it explicitly.
    Profile at_zero = profile(0.0, y);
    if (at_zero.log_lik >= refined.log_lik) return at_zero;
    if (best_ll > refined.log_lik) return profile(grid[best], y);
    return refined;
  }

  LmmFit fit() const { return fit(y_); }

  LmmFit fit(const Eigen::VectorXd& y) const {
    require(y.size() == y_.size(), ErrorCode::InvalidInput, "response length mismatch");
    const Profile best = maximize(y);
    const auto p = x_.cols();
    LmmFit out;
    out.spec = spec_;
    out.columns = columns_;
    out.lambda = best.lambda;
    out.sigma_e2 = best.sigma_e2;
    out.sigma_b2 = best.lambda * best.sigma_e2;
    out.log_lik = best.log_lik;
    out.beta = best.beta;
    out.covariance = best.sigma_e2 * best.a_inverse;
    out.n_obs = n_obs();
    out.n_groups = n_groups_;
    out.n_params = static_cast<std::size_t>(p) + 2;
    out.aic = aic_of(out.log_lik, out.n_params);
    out.bic = bic_of(out.log_lik, out.n_params, out.n_obs);
    out.df_resid = static_cast<double>(out.n_obs) - static_cast<double>(p);
    out.dataset_fingerprint = y.size() == y_.size() && y == y_ ? fingerprint_ : fingerprint_ ^ hash_response(y);
    if (best.floored) out.warnings.push_back("degenerate fit: residual variance floored at 1e-12");

    out.se.resize(p);
    out.t_values.resize(p);
    out.p_values.resize(p);
    out.p_holm = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    const bool have_df = out.df_resid >= 1.0;
    if (!have_df) out.warnings.push_back("no residual degrees of freedom; p-values unavailable");
    std::vector<double> raw;
    std::vector<Eigen::Index> tested;
    for (Eigen::Index j = 0; j < p; ++j) {
      out.se(j) = std::sqrt(std::max(0.0, out.covariance(j, j)));
      out.t_values(j) = out.se(j) > 0.0 ? out.beta(j) / out.se(j) : 0.0;
      out.p_values(j) = have_df ? two_sided_p(out.t_values(j), out.df_resid)
                                : std::numeric_limits<double>::quiet_NaN();
      if (have_df && columns_[static_cast<std::size_t>(j)] != "(Intercept)") {
        raw.push_back(out.p_values(j));
        tested.push_back(j);
      }
    }
    const auto adjusted = holm_adjust(raw);
    for (std::size_t k = 0; k < tested.size(); ++k) out.p_holm(tested[k]) = adjusted[k];
    return out;
  }

  static double two_sided_p(double t, double df) {
    const boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
  }

 private:
  void check_rank() const {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x_);
    const auto rank = qr.rank();
    if (rank == x_.cols()) return;
    const auto& perm = qr.colsPermutation().indices();
    std::vector<Eigen::Index> dropped(perm.data() + rank, perm.data() + x_.cols());
    std::sort(dropped.begin(), dropped.end());
    std::string aliased;
    for (const auto k : dropped) {
      if (!aliased.empty()) aliased += ", ";
      aliased += columns_[static_cast<std::size_t>(k)];
    }
    fail(ErrorCode::ModelSpec, "rank-deficient design; aliased columns: " + aliased);
  }

  static std::uint64_t hash_response(const Eigen::VectorXd& y) {
    std::uint64_t h = 1469598103934665603ULL;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      unsigned char bytes[sizeof(double)];
      const double v = y(i);
      std::memcpy(bytes, &v, sizeof v);
      for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
      }
    }
    return h;
  }

  ModelSpec spec_;
  std::vector<std::string> columns_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  std::vector<std::size_t> group_;
  std::size_t n_groups_ = 0;
  std::vector<double> group_size_;
  Eigen::MatrixXd group_x_sum_;
  Eigen::MatrixXd xtx_;
  std::uint64_t fingerprint_ = 0;
};

inline LmmFit fit_lmm(const ModelSpec& spec, std::span<const AnalysisRow> rows,
                      const Catalog& catalog = default_catalog()) {
  return LmmProblem(spec, rows, catalog).fit();
}

struct ModelRanking {
  std::string name;
  std::size_t n_params = 0;
  double log_lik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double delta_aic = 0.0;
  double delta_bic = 0.0;
};

/// Ranks fits of the same dataset by AIC; ties fall to BIC, then fewer parameters.
inline std::vector<ModelRanking> compare_models(std::span<const LmmFit> fits) {
  require(!fits.empty(), ErrorCode::InvalidComparison, "no fits to compare");
  for (const auto& f : fits) {
    require(f.n_obs == fits.front().n_obs && f.dataset_fingerprint == fits.front().dataset_fingerprint,
            ErrorCode::InvalidComparison, "fits were made on different datasets");
  }
  std::vector<ModelRanking> table;
  for (const auto& f : fits) {
    table.push_back({f.spec.name.empty() ? f.spec.response : f.spec.name, f.n_params, f.log_lik,
                     f.aic, f.bic, 0.0, 0.0});
  }
  std::stable_sort(table.begin(), table.end(), [](const ModelRanking& a, const ModelRanking& b) {
    if (a.aic != b.aic) return a.aic < b.aic;
    if (a.bic != b.bic) return a.bic < b.bic;
    return a.n_params < b.n_params;
  });
  const double best_bic =
      std::min_element(table.begin(), table.end(), [](auto& a, auto& b) { return a.bic < b.bic; })->bic;
  for (auto& row : table) {
    row.delta_aic = row.aic - table.front().aic;
    row.delta_bic = row.bic - best_bic;
  }
  return table;
}

struct Prediction {
  double estimate = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

inline Eigen::VectorXd design_point(const LmmFit& fit, const CovariatePoint& point,
                                    const Catalog& catalog = default_catalog()) {
  const DesignEncoder encoder(fit.spec, catalog);
  const auto row = encoder.encode(point);
  return Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
}

inline Prediction predict_linear(const LmmFit& fit, const Eigen::VectorXd& x) {
  Prediction out;
  out.estimate = x.dot(fit.beta);
  out.se = std::sqrt(std::max(0.0, x.dot(fit.covariance * x)));
  out.lower = out.estimate - kZ975 * out.se;
  out.upper = out.estimate + kZ975 * out.se;
  return out;
}

/// Population-level prediction x'beta with a Wald 95% interval.
inline Prediction marginal_prediction(const LmmFit& fit, const CovariatePoint& point,
                                      const Catalog& catalog = default_catalog()) {
  return predict_linear(fit, design_point(fit, point, catalog));
}

struct Contrast {
  Prediction difference;
  double t = 0.0;
  double p = 1.0;
};

/// Difference between two covariate points, e.g. two conditions at the last trial.
inline Contrast contrast(const LmmFit& fit, const CovariatePoint& a, const CovariatePoint& b,
                         const Catalog& catalog = default_catalog()) {
  const Eigen::VectorXd x = design_point(fit, a, catalog) - design_point(fit, b, catalog);
  Contrast out;
  out.difference = predict_linear(fit, x);
  if (out.difference.se > 0.0) {
    out.t = out.difference.estimate / out.difference.se;
    out.p = LmmProblem::two_sided_p(out.t, std::max(1.0, fit.df_resid));
  }
  return out;
}

/// Point at the end of training: all trait covariates at 0, TrialNumber 27.
inline CovariatePoint last_training_trial(std::string condition_variable, std::string level) {
  return {{std::move(condition_variable), std::move(level)}, {"TrialNumber", 27.0}};
}

}  // namespace springcurl::stats
