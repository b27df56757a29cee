#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <springcurl/stats/lmm.hpp>

#include "oracles.hpp"

using namespace springcurl;
using namespace springcurl::stats;

namespace {

const ModelSpec kNull = parse_model("y ~ 1 + (1|ID)", "null");
const ModelSpec kSlope = parse_model("y ~ TrialNumber + (1|ID)", "slope");

std::vector<AnalysisRow> trial_rows(std::uint32_t seed, int groups, int trials, double b0, double b1,
                                    double sigma_b, double sigma_e) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nb(0.0, sigma_b), ne(0.0, sigma_e);
  std::vector<AnalysisRow> rows;
  for (int g = 0; g < groups; ++g) {
    const double b = sigma_b > 0 ? nb(rng) : 0.0;
    for (int t = 0; t < trials; ++t) {
      AnalysisRow r;
      r.participant_id = "S" + std::to_string(g);
      r.trial_number = t;
      r.value = b0 + b1 * t + b + ne(rng);
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace

TEST(FitLmm, ZeroBetweenVarianceCollapsesToOls) {
  oracle::OneWay data{{1, 2}, {1, 2}, {1, 2}};
  const auto fit = fit_lmm(kNull, oracle::to_rows(data));
  EXPECT_NEAR(fit.beta(0), 1.5, 1e-12);
  EXPECT_EQ(fit.lambda, 0.0);
  EXPECT_EQ(fit.sigma_b2, 0.0);
  EXPECT_NEAR(fit.sigma_e2, 0.25, 1e-12);
  EXPECT_EQ(fit.n_params, 3u);
  EXPECT_EQ(fit.n_obs, 6u);
  EXPECT_EQ(fit.n_groups, 3u);
  EXPECT_TRUE(std::isnan(fit.p_holm(0)));
}

TEST(FitLmm, ProfileMatchesClosedFormOracle) {
  const auto data = oracle::random_one_way(3, 5, 4, 1.0, 0.7);
  const LmmProblem problem(kNull, oracle::to_rows(data));
  for (double lambda : {0.0, 1e-3, 0.1, 1.0, 7.5, 300.0}) {
    EXPECT_NEAR(problem.profile(lambda).log_lik, oracle::one_way_loglik(data, lambda), 1e-9) << lambda;
  }
}

TEST(FitLmm, DominatesDenseGrid) {
  for (std::uint32_t seed = 1; seed <= 6; ++seed) {
    const auto data = oracle::random_one_way(seed, 3 + static_cast<int>(seed % 4), 6, 0.8, 0.5);
    const auto fit = fit_lmm(kNull, oracle::to_rows(data));
    EXPECT_GE(fit.log_lik, oracle::one_way_grid_max(data) - 1e-6) << seed;
    const LmmProblem problem(kNull, oracle::to_rows(data));
    for (int i = 0; i < 1000; ++i) {
      EXPECT_GE(fit.log_lik, problem.profile(1000.0 * i / 999.0).log_lik - 1e-8);
    }
    EXPECT_NEAR(fit.aic, 2.0 * 3 - 2.0 * fit.log_lik, 1e-9);
    EXPECT_NEAR(fit.bic, 3.0 * std::log(static_cast<double>(fit.n_obs)) - 2.0 * fit.log_lik, 1e-9);
    EXPECT_GE(fit.sigma_b2, 0.0);
    EXPECT_GT(fit.sigma_e2, 0.0);
  }
}

TEST(FitLmm, BalancedNoGroupEffectMatchesOls) {
  // Every participant sees the same residual multiset over the same trials,
  // so participant means coincide and the ML variance ratio is exactly 0.
  const std::vector<double> noise{0.3, -0.1, 0.25, -0.4, 0.05, -0.2};
  std::vector<AnalysisRow> rows;
  std::vector<double> x, y;
  for (int g = 0; g < 4; ++g) {
    for (int t = 0; t < 6; ++t) {
      AnalysisRow r;
      r.participant_id = "S" + std::to_string(g);
      r.trial_number = t;
      r.value = 1.0 + 0.1 * t + noise[static_cast<std::size_t>((t + g) % 6)];
      rows.push_back(r);
      x.push_back(t);
      y.push_back(r.value);
    }
  }
  const auto fit = fit_lmm(kSlope, rows);
  EXPECT_EQ(fit.lambda, 0.0);
  EXPECT_NEAR(fit.log_lik, oracle::ols_loglik(x, y), 1e-8);
}

TEST(FitLmm, NeverBelowOlsWithoutGroupEffect) {
  for (std::uint32_t seed = 1; seed <= 10; ++seed) {
    const auto rows = trial_rows(seed, 6, 8, 2.0, -0.05, 0.0, 0.4);
    std::vector<double> x, y;
    for (const auto& r : rows) {
      x.push_back(r.trial_number);
      y.push_back(r.value);
    }
    const auto fit = fit_lmm(kSlope, rows);
    const double ols = oracle::ols_loglik(x, y);
    EXPECT_GE(fit.log_lik, ols - 1e-8);
    if (fit.lambda == 0.0) {
      EXPECT_NEAR(fit.log_lik, ols, 1e-8);
    }
  }
}

TEST(FitLmm, IdenticalResponsesAreFloored) {
  const auto fit = fit_lmm(kNull, oracle::to_rows({{2, 2, 2}, {2, 2, 2}}));
  EXPECT_EQ(fit.sigma_e2, kVarianceFloor);
  ASSERT_FALSE(fit.warnings.empty());
  EXPECT_NE(fit.warnings.front().find("degenerate"), std::string::npos);
  EXPECT_NEAR(fit.beta(0), 2.0, 1e-12);
}

TEST(FitLmm, RankDeficientDesignNamesColumns) {
  auto rows = oracle::to_rows({{1, 2}, {2, 3}});
  try {
    fit_lmm(parse_model("y ~ SpringType + (1|ID)"), rows);
    FAIL() << "expected model-spec error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModelSpec);
    EXPECT_NE(std::string(e.what()).find("SpringType"), std::string::npos) << e.what();
  }
}

TEST(FitLmm, InputValidation) {
  EXPECT_THROW(fit_lmm(kNull, std::vector<AnalysisRow>{}), Error);
  EXPECT_THROW(fit_lmm(kNull, oracle::to_rows({{1, 2, 3}})), Error);
  EXPECT_THROW(fit_lmm(parse_model("y ~ 1 + (1|Other)"), oracle::to_rows({{1, 2}, {3, 4}})), Error);
  // A participant with a single observation still contributes.
  auto rows = oracle::to_rows({{1, 2, 3}, {2, 2, 4}});
  AnalysisRow lone;
  lone.participant_id = "Solo";
  lone.value = 3.0;
  rows.push_back(lone);
  EXPECT_EQ(fit_lmm(kNull, rows).n_groups, 3u);
}

TEST(Marginal, InterceptOnlyAndSelfContrast) {
  const auto fit = fit_lmm(kNull, oracle::to_rows({{1, 2}, {1, 2}, {1, 2}}));
  const auto m = marginal_prediction(fit, {});
  EXPECT_NEAR(m.estimate, 1.5, 1e-12);
  EXPECT_NEAR(m.upper - m.lower, 2.0 * kZ975 * fit.se(0), 1e-12);

  const auto slope = fit_lmm(kSlope, trial_rows(2, 5, 6, 1.0, 0.2, 0.3, 0.2));
  const auto c = contrast(slope, {{"TrialNumber", 3.0}}, {{"TrialNumber", 3.0}});
  EXPECT_EQ(c.difference.estimate, 0.0);
  EXPECT_EQ(c.p, 1.0);
  const auto d = contrast(slope, {{"TrialNumber", 4.0}}, {{"TrialNumber", 3.0}});
  EXPECT_NEAR(d.difference.estimate, slope.beta(1), 1e-12);
  EXPECT_LT(d.p, 0.05);
  EXPECT_THROW(marginal_prediction(slope, {{"Stage", std::string("XX")}}), Error);
}

TEST(Marginal, CiWidthMatchesParametricBootstrap) {
  const auto rows = trial_rows(11, 3, 5, 1.0, 0.3, 0.6, 0.4);
  const auto fit = fit_lmm(kSlope, rows);
  ASSERT_GT(fit.lambda, 0.0);

  // Dense GLS at the fitted variances, built from scratch.
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd x(n, 2), v = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rows[static_cast<std::size_t>(i)].trial_number;
    for (int j = 0; j < n; ++j) {
      if (rows[static_cast<std::size_t>(i)].participant_id == rows[static_cast<std::size_t>(j)].participant_id)
        v(i, j) = fit.sigma_b2;
    }
    v(i, i) += fit.sigma_e2;
  }
  const Eigen::MatrixXd vinv = v.inverse();
  const Eigen::MatrixXd w = (x.transpose() * vinv * x).inverse() * x.transpose() * vinv;
  const Eigen::VectorXd point = (Eigen::VectorXd(2) << 1.0, 4.0).finished();

  std::mt19937_64 rng(5);
  std::normal_distribution<double> nb(0.0, std::sqrt(fit.sigma_b2)), ne(0.0, std::sqrt(fit.sigma_e2));
  std::vector<double> draws;
  draws.reserve(100000);
  Eigen::VectorXd y(n);
  for (int rep = 0; rep < 100000; ++rep) {
    std::string last;
    double b = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto& id = rows[static_cast<std::size_t>(i)].participant_id;
      if (id != last) {
        b = nb(rng);
        last = id;
      }
      y(i) = x.row(i).dot(fit.beta) + b + ne(rng);
    }
    draws.push_back(point.dot(w * y));
  }
  std::sort(draws.begin(), draws.end());
  const double boot_width = draws[97499] - draws[2499];
  const auto m = marginal_prediction(fit, {{"TrialNumber", 4.0}});
  EXPECT_NEAR((m.upper - m.lower) / boot_width, 1.0, 0.05);
}

TEST(Recovery, SlopeAndInterceptWithinThreeSimulationErrors) {
  const double b0 = 1.0, b1 = -0.03;
  const int reps = 50;
  std::vector<double> e0, e1;
  for (int r = 0; r < reps; ++r) {
    const auto fit = fit_lmm(kSlope, trial_rows(1000 + static_cast<std::uint32_t>(r), 30, 28, b0, b1, 0.5, 0.3));
    e0.push_back(fit.beta(0));
    e1.push_back(fit.beta(1));
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  EXPECT_LT(std::abs(mean(e0) - b0), 3.0 * oracle::sample_sd(e0) / std::sqrt(reps));
  EXPECT_LT(std::abs(mean(e1) - b1), 3.0 * oracle::sample_sd(e1) / std::sqrt(reps));
}

TEST(Refit, SameDesignNewResponse) {
  const auto rows = trial_rows(3, 4, 5, 1.0, 0.1, 0.5, 0.2);
  const LmmProblem problem(kSlope, rows);
  const auto a = problem.fit();
  const Eigen::VectorXd shifted = problem.response().array() + 2.0;
  const auto b = problem.fit(shifted);
  EXPECT_NEAR(b.beta(0), a.beta(0) + 2.0, 1e-8);
  EXPECT_NEAR(b.beta(1), a.beta(1), 1e-8);
  EXPECT_NE(a.dataset_fingerprint, b.dataset_fingerprint);
}
