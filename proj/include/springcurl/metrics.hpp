#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "springcurl/error.hpp"
#include "springcurl/shot_record.hpp"

namespace springcurl {

struct ForceError {
  double signed_n = 0.0;
  double absolute_n = 0.0;
};

inline void require_completed(const ShotRecord& r) {
  require(!r.aborted, ErrorCode::MetricUnavailable, "shot was aborted");
}

inline ForceError force_error(const ShotRecord& r, double target_force_n) {
  require_completed(r);
  const double s = r.release_force_n - target_force_n;
  return {s, std::abs(s)};
}

inline ForceError force_error(const ShotRecord& r) { return force_error(r, r.target_force_n); }

inline double elongation_error(const ShotRecord& r, double target_elongation_mm) {
  require_completed(r);
  return std::abs(r.release_elongation_mm - target_elongation_mm);
}

inline double elongation_error(const ShotRecord& r) {
  return elongation_error(r, r.target_elongation_mm);
}

/// Sample standard deviation (n - 1) of signed errors.
inline double sample_sd(std::span<const double> values) {
  require(values.size() >= 2, ErrorCode::MetricUnavailable, "need at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

/// Force SD across the completed shots of one trial.
inline double trial_force_sd(std::span<const ShotRecord> shots, double target_force_n) {
  std::vector<double> errors;
  for (const auto& s : shots) {
    if (!s.aborted) errors.push_back(s.release_force_n - target_force_n);
  }
  require(errors.size() >= 2, ErrorCode::MetricUnavailable, "trial has fewer than two shots");
  return sample_sd(errors);
}

struct PathMetrics {
  double path_length_mm = 0.0;
  int direction_changes = 0;
  friend bool operator==(const PathMetrics&, const PathMetrics&) = default;
};

/// Travel and reversal count along the pull axis between grab and release.
/// A reversal counts once the excursion back from the running extremum
/// exceeds `hysteresis_mm`.
inline PathMetrics path_metrics(std::span<const double> positions, double hysteresis_mm = 1.0) {
  require(!positions.empty(), ErrorCode::MetricUnavailable, "empty trace");
  require(hysteresis_mm >= 0.0, ErrorCode::InvalidInput, "hysteresis must be non-negative");
  PathMetrics m;
  const double origin = positions.front();
  int direction = 0;
  double extremum = origin;
  for (std::size_t i = 1; i < positions.size(); ++i) {
    const double x = positions[i];
    m.path_length_mm += std::abs(x - positions[i - 1]);
    if (direction == 0) {
      if (x - origin > hysteresis_mm) {
        direction = 1;
        extremum = x;
      } else if (origin - x > hysteresis_mm) {
        direction = -1;
        extremum = x;
      }
    } else if (direction > 0) {
      if (x > extremum) {
        extremum = x;
      } else if (extremum - x > hysteresis_mm) {
        ++m.direction_changes;
        direction = -1;
        extremum = x;
      }
    } else {
      if (x < extremum) {
        extremum = x;
      } else if (x - extremum > hysteresis_mm) {
        ++m.direction_changes;
        direction = 1;
        extremum = x;
      }
    }
  }
  return m;
}

/// ln(max(value, floor)) for skewed non-negative outcomes.
inline double log_transform(double value, double floor = 1e-3) {
  require(std::isfinite(value) && value >= 0.0, ErrorCode::InvalidInput,
          "log transform needs a non-negative value");
  return std::log(std::max(value, floor));
}

struct TrialAggregate {
  std::string participant_id;
  PhaseKind phase = PhaseKind::Familiarization;
  int trial_index = 0;
  int completed_shots = 0;
  double mean_abs_force_error_n = 0.0;
  double force_sd_n = 0.0;
  double mean_abs_elongation_error_mm = 0.0;
};

/// Aggregate of one trial's completed shots; absent below two completed shots.
inline std::optional<TrialAggregate> aggregate_trial(std::span<const ShotRecord> shots) {
  std::vector<const ShotRecord*> done;
  for (const auto& s : shots) {
    if (!s.aborted) done.push_back(&s);
  }
  if (done.size() < 2) return std::nullopt;
  TrialAggregate a;
  a.participant_id = done.front()->participant_id;
  a.phase = done.front()->phase;
  a.trial_index = done.front()->trial_index;
  a.completed_shots = static_cast<int>(done.size());
  std::vector<double> signed_errors;
  for (const ShotRecord* s : done) {
    const auto fe = force_error(*s);
    signed_errors.push_back(fe.signed_n);
    a.mean_abs_force_error_n += fe.absolute_n;
    a.mean_abs_elongation_error_mm += elongation_error(*s);
  }
  const auto n = static_cast<double>(done.size());
  a.mean_abs_force_error_n /= n;
  a.mean_abs_elongation_error_mm /= n;
  a.force_sd_n = sample_sd(signed_errors);
  return a;
}

}  // namespace springcurl
