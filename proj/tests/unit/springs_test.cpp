#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <springcurl/springs.hpp>

using namespace springcurl;

namespace {

const SpringParams LS = main_spring(SpringKind::Linear);
const SpringParams GS = main_spring(SpringKind::Gaussian);
const SpringParams AGS = main_spring(SpringKind::AntisymGaussian);

// 10 * exp(-0.5), evaluated independently to 15 digits.
constexpr double kGs63 = 6.06530659712633;

}  // namespace

TEST(SpringForce, HitsTargetForceAtTargetElongation) {
  for (auto kind : {SpringKind::Linear, SpringKind::Gaussian, SpringKind::AntisymGaussian}) {
    EXPECT_NEAR(spring_force(main_spring(kind), 90.0), 10.0, 1e-12) << to_string(kind);
    EXPECT_NEAR(spring_force(transfer_spring(kind), 70.0), 10.0, 1e-12) << to_string(kind);
  }
}

TEST(SpringForce, WorkedValues) {
  EXPECT_NEAR(spring_force(GS, 63.0), kGs63, 1e-12);
  EXPECT_NEAR(spring_force(AGS, 117.0), 20.0 - kGs63, 1e-12);
  EXPECT_NEAR(spring_force(GS, 0.0), 0.0386592013947281, 1e-14);
  EXPECT_NEAR(spring_force(LS, 45.0), 5.0, 1e-12);
}

TEST(SpringForce, NonPositiveElongation) {
  EXPECT_EQ(spring_force(LS, 0.0), 0.0);
  EXPECT_EQ(spring_force(LS, -5.0), 0.0);
  // Gaussian laws are evaluated as written below zero.
  EXPECT_GT(spring_force(GS, -5.0), 0.0);
  EXPECT_NEAR(spring_force(AGS, -5.0), spring_force(GS, -5.0), 1e-15);
}

TEST(SpringForce, RejectsNonFinite) {
  EXPECT_THROW(spring_force(LS, std::numeric_limits<double>::quiet_NaN()), Error);
  EXPECT_THROW(spring_slope(GS, std::numeric_limits<double>::infinity()), Error);
}

TEST(SpringSlope, ValuesAndZeroAtTarget) {
  EXPECT_NEAR(spring_slope(LS, 12.0), 10.0 / 90.0, 1e-15);
  EXPECT_LE(std::abs(spring_slope(GS, 90.0)), 1e-12);
  EXPECT_LE(std::abs(spring_slope(AGS, 90.0)), 1e-12);
}

TEST(SpringSlope, MatchesFiniteDifference) {
  const double h = 1e-5;
  for (const auto& p : {LS, GS, AGS}) {
    for (double x : {10.0, 50.0, 80.0, 100.0, 150.0}) {
      const double fd = (spring_force(p, x + h) - spring_force(p, x - h)) / (2 * h);
      EXPECT_NEAR(spring_slope(p, x), fd, 1e-7) << to_string(p.kind) << " at " << x;
    }
  }
}

TEST(SpringContinuity, AgsAcrossBranchSwitch) {
  const double eps = 1e-9;
  EXPECT_NEAR(spring_force(AGS, 90.0 - eps), spring_force(AGS, 90.0 + eps), 1e-12);
  EXPECT_NEAR(spring_slope(AGS, 90.0 - eps), spring_slope(AGS, 90.0 + eps), 1e-12);
}

TEST(SpringMonotonicity, AgsNonDecreasing) {
  double prev = spring_force(AGS, 0.0);
  for (int i = 1; i <= 30000; ++i) {
    const double x = 300.0 * i / 30000.0;
    const double f = spring_force(AGS, x);
    // Far out the force saturates at 20 N in double precision.
    if (x < 200.0) {
      EXPECT_GT(f, prev) << x;
    } else {
      EXPECT_GE(f, prev) << x;
    }
    prev = f;
  }
}

TEST(InverseElongations, WorkedValues) {
  const auto ls = inverse_elongations(LS, 10.0);
  ASSERT_EQ(ls.size(), 1u);
  EXPECT_NEAR(ls[0], 90.0, 1e-12);

  const auto gs = inverse_elongations(GS, kGs63);
  ASSERT_EQ(gs.size(), 2u);
  EXPECT_NEAR(gs[0], 63.0, 1e-8);
  EXPECT_NEAR(gs[1], 117.0, 1e-8);

  const auto ags = inverse_elongations(AGS, 20.0 - kGs63);
  ASSERT_EQ(ags.size(), 1u);
  EXPECT_NEAR(ags[0], 117.0, 1e-8);

  const auto peak = inverse_elongations(GS, 10.0);
  ASSERT_EQ(peak.size(), 1u);
  EXPECT_EQ(peak[0], 90.0);
}

TEST(InverseElongations, RoundTrip) {
  for (const auto& p : {LS, GS, AGS}) {
    for (double f = 0.5; f < 19.5; f += 0.37) {
      if (p.kind == SpringKind::Gaussian && f > 10.0) break;
      if (p.kind != SpringKind::Linear && f < spring_force(p, 0.0)) continue;
      for (double x : inverse_elongations(p, f)) {
        EXPECT_GE(x, 0.0);
        EXPECT_NEAR(spring_force(p, x), f, 1e-8) << to_string(p.kind) << " f=" << f;
      }
    }
  }
}

TEST(InverseElongations, OutOfRange) {
  EXPECT_THROW(inverse_elongations(GS, 10.5), Error);
  EXPECT_THROW(inverse_elongations(AGS, 20.0), Error);
  EXPECT_THROW(inverse_elongations(LS, 0.0), Error);
  try {
    inverse_elongations(GS, 11.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoSolution);
  }
}

TEST(LinearIntersections, MainSpring) {
  const auto [a, b] = linear_intersections(AGS);
  EXPECT_NEAR(a, 71.9151044520910, 1e-6);
  EXPECT_NEAR(b, 108.084895547909, 1e-6);
  EXPECT_EQ(a + b, 180.0);
  const auto [ga, gb] = linear_intersections(GS);
  EXPECT_EQ(ga, a);
  EXPECT_EQ(gb, b);
}

TEST(LinearIntersections, ScaledTransferGeometry) {
  const auto p = transfer_spring(SpringKind::AntisymGaussian);
  EXPECT_DOUBLE_EQ(p.gaussian_width_mm, 21.0);
  const auto [a, b] = linear_intersections(p);
  EXPECT_NEAR(a + b, 140.0, 1e-12);
  EXPECT_NEAR(a, 70.0 * 71.9151044520910 / 90.0, 1e-6);
}

TEST(LinearIntersections, RejectsLinearSpring) { EXPECT_THROW(linear_intersections(LS), Error); }

TEST(ErrorSymmetry, GaussianAndAntisymmetricErrorsMatch) {
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = 200.0 * i / 10000.0;
    worst = std::max(worst, std::abs(std::abs(spring_force(GS, x) - 10.0) - std::abs(spring_force(AGS, x) - 10.0)));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(SpringParams, Validation) {
  SpringParams p = GS;
  p.gaussian_width_mm = 0.0;
  EXPECT_THROW(validate(p), Error);
  p = LS;
  p.target_force_n = -1.0;
  EXPECT_THROW(validate(p), Error);
  EXPECT_EQ(parse_spring_kind("AGS"), SpringKind::AntisymGaussian);
  EXPECT_THROW(parse_spring_kind("XS"), Error);
}
