#include <gtest/gtest.h>

#include <cmath>

#include <springcurl/physics.hpp>

using namespace springcurl;

TEST(TravelDistance, CalibratedChain) {
  const PhysicsParams phys;
  EXPECT_NEAR(travel_distance(phys, 10.0), 500.0, 1e-9);
  EXPECT_EQ(travel_distance(phys, 0.0), 0.0);
  EXPECT_NEAR(travel_distance(phys, 6.06531), 183.94, 1e-3);
  EXPECT_NEAR(travel_distance(phys, 6.06530659712633), 183.939720585721, 1e-9);
  EXPECT_THROW(travel_distance(phys, -1.0), Error);
}

TEST(TravelDistance, CalibrationSolvedFromBullseye) {
  EXPECT_NEAR(solve_calibration(PhysicsParams{}, 10.0, 500.0), 4900.0, 1e-9);
}

TEST(TravelDistance, StrictlyIncreasing) {
  const PhysicsParams phys;
  double prev = -1.0;
  for (double f = 0.0; f <= 20.0; f += 0.01) {
    const double d = travel_distance(phys, f);
    EXPECT_GT(d, prev);
    prev = d;
  }
}

TEST(ForceForDistance, InverseOfTravel) {
  const PhysicsParams phys;
  EXPECT_NEAR(force_for_distance(phys, 500.0), 10.0, 1e-12);
  EXPECT_NEAR(force_for_distance(phys, 471.0), 9.70566844684074, 1e-9);
  EXPECT_NEAR(force_for_distance(phys, 504.8333), 10.04822, 1e-5);
  for (double f = 0.0; f <= 20.0; f += 0.25) {
    EXPECT_NEAR(force_for_distance(phys, travel_distance(phys, f)), f, 1e-8);
  }
  EXPECT_THROW(force_for_distance(phys, -3.0), Error);
}

TEST(ScoreForDistance, RingExamples) {
  const TargetBoard board;
  EXPECT_EQ(score_for_distance(board, 500.0), 100);
  EXPECT_EQ(score_for_distance(board, 530.0), 0);
  EXPECT_EQ(score_for_distance(board, 473.0), 1);
  EXPECT_EQ(score_for_distance(board, 529.0), 1);  // boundary inclusive
  EXPECT_EQ(score_for_distance(board, 500.0 + 29.0 / 6.0), 100);
  EXPECT_EQ(score_for_distance(board, 506.0), 20);
}

TEST(ScoreForDistance, MonotoneInMiss) {
  const TargetBoard board;
  int prev = 101;
  for (double miss = 0.0; miss <= 35.0; miss += 0.01) {
    const int s = score_for_distance(board, 500.0 + miss);
    EXPECT_LE(s, prev);
    EXPECT_EQ(s, score_for_distance(board, 500.0 - miss));
    prev = s;
  }
}

TEST(ScoreForDistance, ScoringForceWindow) {
  const PhysicsParams phys;
  const TargetBoard board;
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i <= 200000; ++i) {
    const double f = 9.5 + 1.0 * i / 200000.0;
    if (score_for_distance(board, travel_distance(phys, f)) > 0) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  }
  EXPECT_NEAR(lo, 9.70566844684074, 1e-4);
  EXPECT_NEAR(hi, 10.2859126964990, 1e-4);
}

TEST(Board, Validation) {
  TargetBoard b;
  b.ring_boundaries[2] = b.ring_boundaries[1];
  EXPECT_THROW(validate(b), Error);
  const auto eq = equal_width_board(500.0, 29.0);
  EXPECT_NO_THROW(validate(eq));
  EXPECT_EQ(eq.ring_boundaries.back(), 29.0);
  PhysicsParams p;
  p.friction_coeff = 0.0;
  EXPECT_THROW(validate(p), Error);
}
