#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "springcurl/error.hpp"
#include "springcurl/roots.hpp"

namespace springcurl {

enum class SpringKind { Linear, Gaussian, AntisymGaussian };

inline std::string_view to_string(SpringKind kind) {
  switch (kind) {
    case SpringKind::Linear: return "LS";
    case SpringKind::Gaussian: return "GS";
    case SpringKind::AntisymGaussian: return "AGS";
  }
  return "?";
}

inline SpringKind parse_spring_kind(std::string_view name) {
  if (name == "LS") return SpringKind::Linear;
  if (name == "GS") return SpringKind::Gaussian;
  if (name == "AGS") return SpringKind::AntisymGaussian;
  fail(ErrorCode::InvalidInput, "unknown spring kind '" + std::string(name) + "'");
}

/// Force-elongation law. Units: newtons and millimeters of elongation measured
/// from the grab point along the pull axis.
struct SpringParams {
  SpringKind kind = SpringKind::Linear;
  double target_force_n = 10.0;
  double target_elongation_mm = 90.0;
  double gaussian_width_mm = 27.0;

  double linear_stiffness() const { return target_force_n / target_elongation_mm; }

  friend bool operator==(const SpringParams&, const SpringParams&) = default;
};

inline constexpr double kMainTargetElongationMm = 90.0;
inline constexpr double kTransferTargetElongationMm = 70.0;
inline constexpr double kTargetForceN = 10.0;
inline constexpr double kMainGaussianWidthMm = 27.0;

inline SpringParams main_spring(SpringKind kind) {
  return {kind, kTargetForceN, kMainTargetElongationMm, kMainGaussianWidthMm};
}

/// Stiffer transfer spring. Nonlinear variants keep W / dx_T fixed at 0.3.
inline SpringParams transfer_spring(SpringKind kind = SpringKind::Linear) {
  const double ratio = kMainGaussianWidthMm / kMainTargetElongationMm;
  return {kind, kTargetForceN, kTransferTargetElongationMm, ratio * kTransferTargetElongationMm};
}

inline void validate(const SpringParams& p) {
  require(std::isfinite(p.target_force_n) && p.target_force_n > 0.0, ErrorCode::InvalidInput,
          "target force must be positive");
  require(std::isfinite(p.target_elongation_mm) && p.target_elongation_mm > 0.0,
          ErrorCode::InvalidInput, "target elongation must be positive");
  if (p.kind != SpringKind::Linear) {
    require(std::isfinite(p.gaussian_width_mm) && p.gaussian_width_mm > 0.0,
            ErrorCode::InvalidInput, "gaussian width must be positive");
  }
}

namespace detail {

inline double gaussian_envelope(const SpringParams& p, double dx) {
  const double d = dx - p.target_elongation_mm;
  return std::exp(-(d * d) / (2.0 * p.gaussian_width_mm * p.gaussian_width_mm));
}

inline void check_finite(double dx) {
  require(std::isfinite(dx), ErrorCode::InvalidInput, "elongation must be finite");
}

}  // namespace detail

/// Model force (un-clamped by any device limit). Linear clamps to 0 N at
/// non-positive elongation; the Gaussian laws are evaluated as written.
inline double spring_force(const SpringParams& p, double elongation_mm) {
  detail::check_finite(elongation_mm);
  switch (p.kind) {
    case SpringKind::Linear:
      return elongation_mm <= 0.0 ? 0.0 : p.target_force_n * (elongation_mm / p.target_elongation_mm);
    case SpringKind::Gaussian:
      return p.target_force_n * detail::gaussian_envelope(p, elongation_mm);
    case SpringKind::AntisymGaussian: {
      const double g = p.target_force_n * detail::gaussian_envelope(p, elongation_mm);
      return elongation_mm < p.target_elongation_mm ? g : 2.0 * p.target_force_n - g;
    }
  }
  return 0.0;
}

/// dF/d(dx) of the active branch, in N/mm.
inline double spring_slope(const SpringParams& p, double elongation_mm) {
  detail::check_finite(elongation_mm);
  const double d = elongation_mm - p.target_elongation_mm;
  const double w2 = p.gaussian_width_mm * p.gaussian_width_mm;
  switch (p.kind) {
    case SpringKind::Linear:
      return elongation_mm < 0.0 ? 0.0 : p.linear_stiffness();
    case SpringKind::Gaussian:
      return -p.target_force_n * d / w2 * detail::gaussian_envelope(p, elongation_mm);
    case SpringKind::AntisymGaussian: {
      const double s = p.target_force_n * d / w2 * detail::gaussian_envelope(p, elongation_mm);
      return elongation_mm < p.target_elongation_mm ? -s : s;
    }
  }
  return 0.0;
}

/// All non-negative elongations producing `force_n`, ascending.
/// Nonlinear branches are solved by bracketed bisection (1e-9 mm).
inline std::vector<double> inverse_elongations(const SpringParams& p, double force_n) {
  validate(p);
  require(std::isfinite(force_n) && force_n > 0.0, ErrorCode::NoSolution,
          "force must be positive");
  const double ft = p.target_force_n;
  const double xt = p.target_elongation_mm;
  const roots::BisectOptions opts{1e-9, 200};
  auto residual = [&](double x) { return spring_force(p, x) - force_n; };

  switch (p.kind) {
    case SpringKind::Linear:
      return {force_n / p.linear_stiffness()};

    case SpringKind::Gaussian: {
      require(force_n <= ft, ErrorCode::NoSolution, "force above the Gaussian peak");
      if (force_n == ft) return {xt};
      std::vector<double> out;
      if (spring_force(p, 0.0) <= force_n) out.push_back(roots::bisect(residual, 0.0, xt, opts));
      auto bracket = roots::expand_right(residual, xt, p.gaussian_width_mm);
      require(bracket.has_value(), ErrorCode::NoSolution, "no bracket on the falling branch");
      out.push_back(roots::bisect(residual, bracket->first, bracket->second, opts));
      return out;
    }

    case SpringKind::AntisymGaussian: {
      require(force_n < 2.0 * ft, ErrorCode::NoSolution, "force at or above the AGS asymptote");
      require(spring_force(p, 0.0) <= force_n, ErrorCode::NoSolution,
              "force below the AGS value at zero elongation");
      if (force_n == ft) return {xt};
      if (force_n < ft) return {roots::bisect(residual, 0.0, xt, opts)};
      auto bracket = roots::expand_right(residual, xt, p.gaussian_width_mm);
      require(bracket.has_value(), ErrorCode::NoSolution, "no bracket on the rising branch");
      return {roots::bisect(residual, bracket->first, bracket->second, opts)};
    }
  }
  return {};
}

/// Elongations where a nonlinear spring crosses the same-parameter linear spring.
struct LinearCrossings {
  double a_mm = 0.0;  ///< lower non-target crossing, a < dx_T
  double b_mm = 0.0;  ///< mirror of a about dx_T
  double near_zero_mm = 0.0;    ///< tiny crossing close to the origin
  double near_double_mm = 0.0;  ///< its mirror close to 2 * dx_T
};

inline LinearCrossings linear_crossings(const SpringParams& p) {
  validate(p);
  require(p.kind != SpringKind::Linear, ErrorCode::InvalidInput,
          "crossings are defined for the Gaussian springs only");
  SpringParams gs = p;
  gs.kind = SpringKind::Gaussian;
  const double k = p.linear_stiffness();
  const double xt = p.target_elongation_mm;
  // Left of the target the GS and AGS laws coincide.
  auto gap = [&](double x) { return spring_force(gs, x) - k * x; };

  // Scan (0, dx_T) for the two sign changes; the target itself is excluded.
  constexpr int kScan = 4000;
  std::vector<std::pair<double, double>> brackets;
  double prev_x = 0.0;
  double prev_g = gap(0.0);
  for (int i = 1; i < kScan; ++i) {
    const double x = xt * static_cast<double>(i) / kScan;
    const double g = gap(x);
    if (std::signbit(g) != std::signbit(prev_g)) brackets.emplace_back(prev_x, x);
    prev_x = x;
    prev_g = g;
  }
  require(brackets.size() == 2, ErrorCode::NoSolution,
          "expected two crossings below the target elongation");
  const roots::BisectOptions opts{1e-9, 200};
  LinearCrossings out;
  out.near_zero_mm = roots::bisect(gap, brackets[0].first, brackets[0].second, opts);
  out.a_mm = roots::bisect(gap, brackets[1].first, brackets[1].second, opts);
  out.b_mm = 2.0 * xt - out.a_mm;
  out.near_double_mm = 2.0 * xt - out.near_zero_mm;
  return out;
}

/// The a-b interval around the target inside which the nonlinear force error
/// is smaller than the linear one.
inline std::pair<double, double> linear_intersections(const SpringParams& p) {
  const auto c = linear_crossings(p);
  return {c.a_mm, c.b_mm};
}

}  // namespace springcurl
