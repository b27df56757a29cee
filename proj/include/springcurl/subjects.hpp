#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "springcurl/engine.hpp"
#include "springcurl/error.hpp"
#include "springcurl/springs.hpp"

namespace springcurl {

using SubjectRng = boost::random::mt19937_64;

/// Questionnaire-derived traits. Unit-interval scores except locus of
/// control, which runs from -1 (internal) to +1 (external).
struct TraitProfile {
  double free_spirit = 0.5;
  double achiever = 0.5;
  double challenge = 0.5;
  double boredom = 0.5;
  double curiosity = 0.5;
  double locus_of_control = 0.0;

  friend bool operator==(const TraitProfile&, const TraitProfile&) = default;
};

inline void validate(const TraitProfile& t) {
  for (double v : {t.free_spirit, t.achiever, t.challenge, t.boredom, t.curiosity}) {
    require(v >= 0.0 && v <= 1.0, ErrorCode::InvalidInput, "trait score outside [0, 1]");
  }
  require(t.locus_of_control >= -1.0 && t.locus_of_control <= 1.0, ErrorCode::InvalidInput,
          "locus of control outside [-1, 1]");
}

struct PolicyParams {
  double learning_rate = 0.05;  ///< mm of elongation per game-unit of landing error
  double motor_noise_sd_mm = 2.0;
  double across_shot_jitter_sd_max_mm = 10.0;  ///< scaled by free spirit
  double within_shot_explore_rate_max = 3.0;   ///< expected probes per shot, scaled by challenge
  double explore_decay = 0.97;                 ///< per completed trial
  double pull_speed_mm_s = 150.0;
  double approach_speed_mm_s = 100.0;
  double memory_decay_per_day = 0.1;
  double probe_amplitude_min_mm = 10.0;
  double probe_amplitude_max_mm = 25.0;
  double target_distance = 500.0;
  double max_elongation_mm = 300.0;
  /// Revert to the best elongation seen when pulling further lands shorter.
  bool reset_on_reversal = true;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

inline void validate(const PolicyParams& p) {
  require(p.learning_rate >= 0 && p.motor_noise_sd_mm >= 0 && p.across_shot_jitter_sd_max_mm >= 0 &&
              p.within_shot_explore_rate_max >= 0 && p.pull_speed_mm_s > 0 &&
              p.approach_speed_mm_s > 0 && p.memory_decay_per_day >= 0 &&
              p.memory_decay_per_day <= 1 && p.probe_amplitude_min_mm >= 0 &&
              p.probe_amplitude_max_mm >= p.probe_amplitude_min_mm,
          ErrorCode::InvalidInput, "policy parameters must be non-negative");
  require(p.explore_decay > 0 && p.explore_decay <= 1, ErrorCode::InvalidInput,
          "explore decay must lie in (0, 1]");
}

struct SubjectState {
  double remembered_elongation_mm = 60.0;
  /// Posture-anchored memory, expressed as the elongation it produces at the current foot strip.
  double posture_reference_mm = 60.0;
  double mix_weight = 0.0;
  int last_foot_position = 1;

  double baseline_sum_mm = 0.0;
  int baseline_count = 0;

  // Shot history within the current spring context, for reversal detection.
  std::optional<double> previous_release_mm;
  std::optional<double> previous_landing;
  std::optional<double> best_release_mm;
  double best_abs_error = 0.0;
  std::optional<SpringParams> context_spring;

  friend bool operator==(const SubjectState&, const SubjectState&) = default;
};

inline SubjectState make_subject_state(double initial_elongation_mm, double mix_weight,
                                       int foot_position = 1) {
  require(initial_elongation_mm >= 0.0, ErrorCode::InvalidInput,
          "remembered elongation must be non-negative");
  require(mix_weight >= 0.0 && mix_weight <= 1.0, ErrorCode::InvalidInput,
          "mix weight outside [0, 1]");
  SubjectState s;
  s.remembered_elongation_mm = initial_elongation_mm;
  s.posture_reference_mm = initial_elongation_mm;
  s.mix_weight = mix_weight;
  s.last_foot_position = foot_position;
  return s;
}

/// Elongation the subject currently aims for, before noise.
inline double intended_elongation(const SubjectState& s) {
  return (1.0 - s.mix_weight) * s.remembered_elongation_mm + s.mix_weight * s.posture_reference_mm;
}

/// How much of the spring the subject has experienced so far.
struct ExposureHistory {
  int trials_completed = 0;
};

/// One minimum-jerk move in elongation space.
struct PullSegment {
  double from_mm = 0.0;
  double to_mm = 0.0;
  std::int64_t duration_ms = 1;
};

struct PullPlan {
  std::vector<PullSegment> segments;
  double intended_elongation_mm = 0.0;
  double release_elongation_mm = 0.0;
  int probes = 0;

  std::int64_t duration_ms() const {
    std::int64_t t = 0;
    for (const auto& s : segments) t += s.duration_ms;
    return t;
  }

  /// Elongation `t_ms` after the grab.
  double elongation_at(double t_ms) const {
    double start = 0.0;
    for (const auto& s : segments) {
      const auto dur = static_cast<double>(s.duration_ms);
      if (t_ms <= start + dur) {
        const double tau = std::clamp((t_ms - start) / dur, 0.0, 1.0);
        const double shape = tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
        return s.from_mm + (s.to_mm - s.from_mm) * shape;
      }
      start += dur;
    }
    return release_elongation_mm;
  }
};

inline std::int64_t move_duration_ms(double distance_mm, double speed_mm_s) {
  const auto ms = static_cast<std::int64_t>(std::llround(1000.0 * std::abs(distance_mm) / speed_mm_s));
  return std::max<std::int64_t>(ms, 1);
}

/// Pull toward the remembered elongation with across-shot jitter, motor noise
/// and a Poisson number of back-and-forth probes before release.
inline PullPlan plan_shot(const SubjectState& state, const PolicyParams& params,
                          const TraitProfile& traits, const ExposureHistory& history,
                          SubjectRng& rng) {
  using boost::random::normal_distribution;
  using boost::random::poisson_distribution;
  using boost::random::uniform_real_distribution;

  PullPlan plan;
  plan.intended_elongation_mm = intended_elongation(state);

  double release = plan.intended_elongation_mm;
  const double jitter_sd = params.across_shot_jitter_sd_max_mm * traits.free_spirit;
  if (jitter_sd > 0.0) release += normal_distribution<double>(0.0, jitter_sd)(rng);
  if (params.motor_noise_sd_mm > 0.0) {
    release += normal_distribution<double>(0.0, params.motor_noise_sd_mm)(rng);
  }
  release = std::clamp(release, 0.0, params.max_elongation_mm);
  plan.release_elongation_mm = release;

  const double rate = params.within_shot_explore_rate_max * traits.challenge *
                      std::pow(params.explore_decay, history.trials_completed);
  if (rate > 0.0) plan.probes = poisson_distribution<int, double>(rate)(rng);

  plan.segments.push_back({0.0, release, move_duration_ms(release, params.pull_speed_mm_s)});
  for (int i = 0; i < plan.probes; ++i) {
    double amp = params.probe_amplitude_min_mm;
    if (params.probe_amplitude_max_mm > params.probe_amplitude_min_mm) {
      amp = uniform_real_distribution<double>(params.probe_amplitude_min_mm,
                                              params.probe_amplitude_max_mm)(rng);
    }
    amp = std::min(amp, release);
    const auto dur = move_duration_ms(amp, params.pull_speed_mm_s);
    plan.segments.push_back({release, release - amp, dur});
    plan.segments.push_back({release - amp, release, dur});
  }
  return plan;
}

/// Realizes a PullPlan on the engine: approach, grab, follow the elongation
/// profile, release at its end.
class PullPlanDriver {
 public:
  PullPlanDriver(PullPlan plan, double approach_speed_mm_s, int step_ms)
      : plan_(std::move(plan)), approach_speed_(approach_speed_mm_s), step_ms_(step_ms) {}

  StepInput next_input(const ShotState& s) {
    const double dt = static_cast<double>(step_ms_) / 1000.0;
    switch (s.phase) {
      case ShotPhase::Approach: {
        const double gap = s.cube_position_mm - s.effector.position_mm;
        if (std::abs(gap) <= 1e-9) return {0.0, true};
        return {std::clamp(gap / dt, -approach_speed_, approach_speed_), false};
      }
      case ShotPhase::Grabbed: {
        elapsed_ms_ += step_ms_;
        const bool last = elapsed_ms_ >= plan_.duration_ms();
        const double e = last ? plan_.release_elongation_mm
                              : plan_.elongation_at(static_cast<double>(elapsed_ms_));
        const double goal = *s.grab_anchor_mm - e;
        return {(goal - s.effector.position_mm) / dt, !last};
      }
      default:
        return {0.0, false};
    }
  }

  const PullPlan& plan() const { return plan_; }

 private:
  PullPlan plan_;
  double approach_speed_;
  int step_ms_;
  std::int64_t elapsed_ms_ = 0;
};

struct ShotFeedback {
  double landing = 0.0;
  double release_elongation_mm = 0.0;
};

/// Clears the reversal history when the rendered spring changes.
inline SubjectState enter_spring_context(SubjectState s, const SpringParams& spring) {
  if (s.context_spring != spring) {
    s.context_spring = spring;
    s.previous_release_mm.reset();
    s.previous_landing.reset();
    s.best_release_mm.reset();
    s.best_abs_error = 0.0;
  }
  return s;
}

/// Error-driven update of both memory components from the landing error.
inline SubjectState update_after_outcome(SubjectState s, const PolicyParams& params,
                                         double landing,
                                         std::optional<double> release_elongation_mm = {}) {
  const double error = params.target_distance - landing;
  double shift = params.learning_rate * error;

  if (release_elongation_mm) {
    const double rel = *release_elongation_mm;
    if (params.reset_on_reversal && s.previous_release_mm && s.best_release_mm) {
      const double de = rel - *s.previous_release_mm;
      const double dl = landing - *s.previous_landing;
      // Pulling further landed shorter (or the reverse): past a force peak.
      if (de * dl < 0.0 && std::abs(de) > 1e-9) {
        shift = *s.best_release_mm - intended_elongation(s);
      }
    }
    if (!s.best_release_mm || std::abs(error) < s.best_abs_error) {
      s.best_release_mm = rel;
      s.best_abs_error = std::abs(error);
    }
    s.previous_release_mm = rel;
    s.previous_landing = landing;
  }

  s.remembered_elongation_mm =
      std::clamp(s.remembered_elongation_mm + shift, 0.0, params.max_elongation_mm);
  s.posture_reference_mm = s.posture_reference_mm + shift;
  return s;
}

/// Strip pitch: 40 mm strip plus 30 mm gap.
inline constexpr double kFootStripPitchMm = 70.0;

inline SubjectState apply_foot_shift(SubjectState s, int new_foot_position) {
  require(new_foot_position >= 0 && new_foot_position <= 2, ErrorCode::InvalidInput,
          "foot position must be 0, 1 or 2");
  s.posture_reference_mm += (new_foot_position - s.last_foot_position) * kFootStripPitchMm;
  s.last_foot_position = new_foot_position;
  return s;
}

inline SubjectState record_baseline(SubjectState s, double release_elongation_mm) {
  s.baseline_sum_mm += release_elongation_mm;
  ++s.baseline_count;
  return s;
}

/// Regression of both memory components toward the baseline mean over a gap of days.
inline SubjectState apply_day_gap(SubjectState s, const PolicyParams& params, int days) {
  require(days >= 0, ErrorCode::InvalidInput, "day gap must be non-negative");
  if (s.baseline_count == 0 || days == 0) return s;
  const double base = s.baseline_sum_mm / s.baseline_count;
  const double keep = std::pow(1.0 - params.memory_decay_per_day, days);
  s.remembered_elongation_mm = base + keep * (s.remembered_elongation_mm - base);
  s.posture_reference_mm = base + keep * (s.posture_reference_mm - base);
  return s;
}

}  // namespace springcurl
