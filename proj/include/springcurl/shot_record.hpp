#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "springcurl/conditions.hpp"
#include "springcurl/springs.hpp"

namespace springcurl {

/// Outcome of one shot together with its protocol context.
struct ShotRecord {
  std::string participant_id;
  GroupCondition condition = GroupCondition::Linear;
  PhaseKind phase = PhaseKind::Familiarization;
  int trial_index = 0;
  std::optional<int> training_trial_number;
  int shot_number = 0;
  SpringKind spring_kind = SpringKind::Linear;
  double target_force_n = kTargetForceN;
  double target_elongation_mm = kMainTargetElongationMm;
  bool is_catch = false;
  bool is_transfer = false;
  int foot_position = 1;

  bool aborted = false;
  double release_force_n = 0.0;
  double release_elongation_mm = 0.0;
  double landing = 0.0;
  int score = 0;
  double path_length_mm = 0.0;
  int direction_changes = 0;

  std::int64_t start_ms = 0;
  std::int64_t grab_ms = 0;
  std::int64_t release_ms = 0;
  std::int64_t steps = 0;

  friend bool operator==(const ShotRecord&, const ShotRecord&) = default;
};

}  // namespace springcurl
