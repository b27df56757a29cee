#pragma once

#include <array>
#include <cmath>

#include "springcurl/error.hpp"

namespace springcurl {

/// Constants of the cube-sliding law. `calibration` rescales the physical
/// distance (meters) into board game-units so that 10 N lands on the center.
struct PhysicsParams {
  double cube_mass_kg = 1.0;
  double gravity_mps2 = 9.8;
  double friction_coeff = 0.02;
  double frame_update_s = 0.02;
  double calibration = 4900.0;

  friend bool operator==(const PhysicsParams&, const PhysicsParams&) = default;
};

struct TargetBoard {
  double center_distance = 500.0;
  double board_radius = 29.0;
  std::array<int, 6> ring_points{100, 20, 10, 5, 2, 1};
  /// Outer radius of each ring, innermost first. Equal-width rings.
  std::array<double, 6> ring_boundaries{29.0 / 6.0,       2.0 * 29.0 / 6.0, 3.0 * 29.0 / 6.0,
                                        4.0 * 29.0 / 6.0, 5.0 * 29.0 / 6.0, 29.0};

  friend bool operator==(const TargetBoard&, const TargetBoard&) = default;
};

inline TargetBoard equal_width_board(double center_distance, double board_radius) {
  TargetBoard b;
  b.center_distance = center_distance;
  b.board_radius = board_radius;
  for (std::size_t i = 0; i < b.ring_boundaries.size(); ++i) {
    b.ring_boundaries[i] = board_radius * static_cast<double>(i + 1) / 6.0;
  }
  b.ring_boundaries.back() = board_radius;
  return b;
}

inline void validate(const PhysicsParams& p) {
  require(p.cube_mass_kg > 0 && p.gravity_mps2 > 0 && p.friction_coeff > 0 &&
              p.frame_update_s > 0 && p.calibration > 0,
          ErrorCode::InvalidInput, "physics constants must be positive");
}

inline void validate(const TargetBoard& b) {
  require(b.board_radius > 0 && b.center_distance > 0, ErrorCode::InvalidInput,
          "board geometry must be positive");
  double prev = 0.0;
  for (double r : b.ring_boundaries) {
    require(r > prev, ErrorCode::InvalidInput, "ring boundaries must ascend strictly");
    prev = r;
  }
  require(b.ring_boundaries.back() == b.board_radius, ErrorCode::InvalidInput,
          "last ring boundary must equal the board radius");
}

/// Distance per squared newton: D(F) = gain * F^2.
inline double distance_gain(const PhysicsParams& p) {
  const double impulse_per_newton = p.frame_update_s / p.cube_mass_kg;
  return p.calibration * impulse_per_newton * impulse_per_newton /
         (2.0 * p.friction_coeff * p.gravity_mps2);
}

/// Sliding distance (game-units) for a release force.
inline double travel_distance(const PhysicsParams& p, double release_force_n) {
  require(std::isfinite(release_force_n) && release_force_n >= 0.0, ErrorCode::InvalidInput,
          "release force must be non-negative");
  return distance_gain(p) * release_force_n * release_force_n;
}

inline double force_for_distance(const PhysicsParams& p, double landing) {
  require(std::isfinite(landing) && landing >= 0.0, ErrorCode::InvalidInput,
          "distance must be non-negative");
  return std::sqrt(landing / distance_gain(p));
}

/// Calibration constant that makes `force_n` land at `distance`.
inline double solve_calibration(PhysicsParams p, double force_n, double distance) {
  p.calibration = 1.0;
  return distance / travel_distance(p, force_n);
}

/// Points for a landing position; ring boundaries are inclusive.
inline int score_for_distance(const TargetBoard& board, double landing) {
  const double miss = std::abs(landing - board.center_distance);
  if (!(miss <= board.board_radius)) return 0;
  for (std::size_t i = 0; i < board.ring_boundaries.size(); ++i) {
    if (miss <= board.ring_boundaries[i]) return board.ring_points[i];
  }
  return 0;
}

}  // namespace springcurl
