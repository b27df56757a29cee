#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <springcurl/metrics.hpp>

#include "oracles.hpp"

using namespace springcurl;

namespace {

ShotRecord released(double force_n, double elongation_mm, double target_force = 10.0,
                    double target_elongation = 90.0) {
  ShotRecord r;
  r.release_force_n = force_n;
  r.release_elongation_mm = elongation_mm;
  r.target_force_n = target_force;
  r.target_elongation_mm = target_elongation;
  return r;
}

std::vector<ShotRecord> with_errors(std::initializer_list<double> errors) {
  std::vector<ShotRecord> out;
  for (double e : errors) out.push_back(released(10.0 + e, 90.0));
  return out;
}

}  // namespace

TEST(ForceError, SignedAndAbsolute) {
  const auto e = force_error(released(9.2, 80.0));
  EXPECT_NEAR(e.signed_n, -0.8, 1e-12);
  EXPECT_NEAR(e.absolute_n, 0.8, 1e-12);
  EXPECT_EQ(force_error(released(10.0, 90.0)).absolute_n, 0.0);
  EXPECT_NEAR(force_error(released(6.06530659712633, 117.0)).absolute_n, 3.93469340287367, 1e-12);
}

TEST(ForceError, AbortedShotIsUnavailable) {
  auto r = released(9.0, 80.0);
  r.aborted = true;
  try {
    force_error(r);
    FAIL() << "expected metric-unavailable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MetricUnavailable);
  }
  EXPECT_THROW(elongation_error(r), Error);
}

TEST(ElongationError, Examples) {
  EXPECT_EQ(elongation_error(released(10.0, 90.0)), 0.0);
  EXPECT_NEAR(elongation_error(released(7.0, 63.0)), 27.0, 1e-12);
  EXPECT_NEAR(elongation_error(released(10.7, 74.83, 10.0, 70.0)), 4.83, 1e-12);
}

TEST(TrialForceSd, Examples) {
  EXPECT_NEAR(trial_force_sd(with_errors({-0.5, 0.3, 0.2, 0.0}), 10.0), 0.3559026084010437, 1e-12);
  EXPECT_NEAR(trial_force_sd(with_errors({0.2, 0.2, 0.2, 0.2}), 10.0), 0.0, 1e-12);
  EXPECT_NEAR(trial_force_sd(with_errors({-1.0, 1.0}), 10.0), std::sqrt(2.0), 1e-12);
}

TEST(TrialForceSd, NeedsTwoCompletedShots) {
  auto shots = with_errors({0.1, 0.4});
  shots[1].aborted = true;
  try {
    trial_force_sd(shots, 10.0);
    FAIL() << "expected metric-unavailable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MetricUnavailable);
  }
  EXPECT_FALSE(aggregate_trial(shots).has_value());
}

TEST(TrialForceSd, MatchesOracleAndIsShiftInvariant) {
  std::mt19937 rng(17);
  std::normal_distribution<double> n(0.0, 0.7);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> errs(6);
    for (auto& e : errs) e = n(rng);
    std::vector<ShotRecord> shots, shifted;
    for (double e : errs) {
      shots.push_back(released(10.0 + e, 90.0));
      shifted.push_back(released(12.5 + e, 90.0));
    }
    const double sd = trial_force_sd(shots, 10.0);
    EXPECT_NEAR(sd, oracle::sample_sd(errs), 1e-12);
    EXPECT_NEAR(trial_force_sd(shifted, 10.0), sd, 1e-12);
  }
}

TEST(AggregateTrial, SkipsAbortedShots) {
  auto shots = with_errors({-0.5, 0.3, 0.2, 0.0});
  auto aborted = released(0.0, 0.0);
  aborted.aborted = true;
  shots.insert(shots.begin() + 1, aborted);
  const auto agg = aggregate_trial(shots);
  ASSERT_TRUE(agg.has_value());
  EXPECT_EQ(agg->completed_shots, 4);
  EXPECT_NEAR(agg->mean_abs_force_error_n, 0.25, 1e-12);
  EXPECT_NEAR(agg->force_sd_n, 0.3559026084010437, 1e-12);
}

TEST(PathMetrics, Examples) {
  const std::vector<double> monotone{0.0, 30.0, 60.0, 90.0};
  EXPECT_EQ(path_metrics(monotone), (PathMetrics{90.0, 0}));
  const std::vector<double> back{0.0, 50.0, 100.0, 85.0};
  EXPECT_EQ(path_metrics(back), (PathMetrics{115.0, 1}));
  const std::vector<double> dip{0.0, 50.0, 49.5, 90.0};
  const auto m = path_metrics(dip);
  EXPECT_NEAR(m.path_length_mm, 91.0, 1e-12);
  EXPECT_EQ(m.direction_changes, 0);
  EXPECT_THROW(path_metrics(std::vector<double>{}), Error);
}

TEST(PathMetrics, LowerBoundAndHysteresisMonotone) {
  std::mt19937 rng(5);
  std::normal_distribution<double> step(-0.4, 1.5);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<double> trace{0.0};
    for (int i = 0; i < 300; ++i) trace.push_back(trace.back() + step(rng));
    int prev = 1 << 30;
    for (double h : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      const auto pm = path_metrics(trace, h);
      EXPECT_GE(pm.path_length_mm, std::abs(trace.back() - trace.front()) - 1e-12);
      EXPECT_LE(pm.direction_changes, prev);
      prev = pm.direction_changes;
    }
  }
}

TEST(LogTransform, FloorAndDomain) {
  EXPECT_EQ(log_transform(1.0), 0.0);
  EXPECT_NEAR(log_transform(std::exp(1.0)), 1.0, 1e-15);
  EXPECT_NEAR(log_transform(0.0), -6.907755278982137, 1e-12);
  try {
    log_transform(-0.1);
    FAIL() << "expected invalid input";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}
