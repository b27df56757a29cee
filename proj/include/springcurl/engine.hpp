#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "springcurl/error.hpp"
#include "springcurl/metrics.hpp"
#include "springcurl/physics.hpp"
#include "springcurl/shot_record.hpp"
#include "springcurl/springs.hpp"

namespace springcurl {

/// End-effector sample. Position is along the pull axis; pulling toward the
/// participant makes it more negative.
struct EndEffectorState {
  double position_mm = 0.0;
  double lateral_y_mm = 0.0;
  double lateral_z_mm = 0.0;
  bool button_pressed = false;
  double rendered_force_n = 0.0;
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const EndEffectorState&, const EndEffectorState&) = default;
};

enum class ShotPhase { Idle, Approach, Grabbed, Released, Scored };

inline std::string_view to_string(ShotPhase p) {
  switch (p) {
    case ShotPhase::Idle: return "Idle";
    case ShotPhase::Approach: return "Approach";
    case ShotPhase::Grabbed: return "Grabbed";
    case ShotPhase::Released: return "Released";
    case ShotPhase::Scored: return "Scored";
  }
  return "?";
}

struct DeviceConfig {
  int step_ms = 1;
  double force_limit_n = 20.0;
  /// Lateral axes are simulated as rigid constraints; kept for the manifest.
  double lateral_stiffness_n_per_mm = 7.0;
  double grab_radius_mm = 5.0;
  std::int64_t shot_timeout_ms = 30000;
  int trace_hz = 100;

  friend bool operator==(const DeviceConfig&, const DeviceConfig&) = default;
};

inline void validate(const DeviceConfig& c) {
  require(c.step_ms > 0, ErrorCode::InvalidInput, "step must be positive");
  require(c.force_limit_n > 0 && c.grab_radius_mm > 0 && c.shot_timeout_ms > 0 && c.trace_hz > 0,
          ErrorCode::InvalidInput, "device limits must be positive");
}

struct ShotState {
  EndEffectorState effector;
  ShotPhase phase = ShotPhase::Idle;
  double cube_position_mm = 0.0;
  std::optional<double> grab_anchor_mm;

  friend bool operator==(const ShotState&, const ShotState&) = default;
};

struct StepInput {
  double commanded_velocity_mm_s = 0.0;
  bool button_pressed = false;
};

struct GrabEvent {
  double anchor_mm = 0.0;
  std::int64_t timestamp_ms = 0;
};

struct ReleaseEvent {
  double force_n = 0.0;
  double elongation_mm = 0.0;
  std::int64_t timestamp_ms = 0;
};

using ShotEvent = std::variant<GrabEvent, ReleaseEvent>;

struct StepResult {
  ShotState state;
  std::optional<ShotEvent> event;
};

/// Elongation under the pull-toward-participant convention.
inline double elongation(const ShotState& s) {
  if (!s.grab_anchor_mm) return 0.0;
  return std::max(0.0, *s.grab_anchor_mm - s.effector.position_mm);
}

inline double rendered_force(const SpringParams& spring, double elongation_mm,
                             const DeviceConfig& cfg) {
  return std::clamp(spring_force(spring, elongation_mm), 0.0, cfg.force_limit_n);
}

/// Advances the shot by one fixed step.
inline StepResult step(const ShotState& in, const StepInput& input, const SpringParams& spring,
                       const DeviceConfig& cfg) {
  require(std::isfinite(input.commanded_velocity_mm_s), ErrorCode::InvalidInput,
          "commanded velocity must be finite");
  StepResult out{in, std::nullopt};
  ShotState& s = out.state;
  const double dt_s = static_cast<double>(cfg.step_ms) / 1000.0;
  s.effector.position_mm += input.commanded_velocity_mm_s * dt_s;
  s.effector.lateral_y_mm = 0.0;
  s.effector.lateral_z_mm = 0.0;
  s.effector.timestamp_ms += cfg.step_ms;

  switch (in.phase) {
    case ShotPhase::Idle:
    case ShotPhase::Released:
    case ShotPhase::Scored:
      require(!input.button_pressed, ErrorCode::ProtocolViolation,
              std::string("button input while ") + std::string(to_string(in.phase)));
      s.effector.button_pressed = false;
      s.effector.rendered_force_n = 0.0;
      break;

    case ShotPhase::Approach: {
      const bool press_edge = input.button_pressed && !in.effector.button_pressed;
      s.effector.button_pressed = input.button_pressed;
      s.effector.rendered_force_n = 0.0;
      if (press_edge &&
          std::abs(s.effector.position_mm - s.cube_position_mm) <= cfg.grab_radius_mm) {
        s.phase = ShotPhase::Grabbed;
        s.grab_anchor_mm = s.effector.position_mm;
        out.event = GrabEvent{s.effector.position_mm, s.effector.timestamp_ms};
      }
      break;
    }

    case ShotPhase::Grabbed: {
      const double dx = elongation(s);
      const double force = rendered_force(spring, dx, cfg);
      if (input.button_pressed) {
        s.effector.button_pressed = true;
        s.effector.rendered_force_n = force;
      } else {
        s.effector.button_pressed = false;
        s.effector.rendered_force_n = 0.0;
        s.phase = ShotPhase::Released;
        out.event = ReleaseEvent{force, dx, s.effector.timestamp_ms};
      }
      break;
    }
  }
  return out;
}

inline ShotState begin_shot(ShotState s) {
  require(s.phase == ShotPhase::Idle, ErrorCode::ProtocolViolation, "shot already in progress");
  s.phase = ShotPhase::Approach;
  s.grab_anchor_mm.reset();
  return s;
}

struct ShotOutcome {
  double landing = 0.0;
  int score = 0;
};

inline ShotOutcome resolve_landing(ShotState& s, double release_force_n, const PhysicsParams& phys,
                                   const TargetBoard& board) {
  require(s.phase == ShotPhase::Released, ErrorCode::ProtocolViolation,
          "landing requested before release");
  s.phase = ShotPhase::Scored;
  const double landing = travel_distance(phys, release_force_n);
  return {landing, score_for_distance(board, landing)};
}

inline ShotState reset_shot(ShotState s) {
  require(s.phase == ShotPhase::Scored, ErrorCode::ProtocolViolation, "shot not scored yet");
  s.phase = ShotPhase::Idle;
  s.grab_anchor_mm.reset();
  return s;
}

/// Incremental shot lifecycle shared by headless runs and the live service.
/// Owns the trace between grab and release at full step rate.
class ShotRunner {
 public:
  ShotRunner(SpringParams spring, PhysicsParams phys, TargetBoard board, DeviceConfig cfg,
             ShotRecord context, ShotState start)
      : spring_(spring), phys_(phys), board_(board), cfg_(cfg), record_(std::move(context)) {
    validate(spring_);
    validate(cfg_);
    state_ = begin_shot(start);
    record_.start_ms = state_.effector.timestamp_ms;
  }

  /// One engine step. Throws ShotTimeout once the timeout elapses unreleased.
  std::optional<ShotEvent> tick(const StepInput& input) {
    require(state_.phase == ShotPhase::Approach || state_.phase == ShotPhase::Grabbed,
            ErrorCode::ProtocolViolation, "shot already released");
    auto result = step(state_, input, spring_, cfg_);
    state_ = result.state;
    ++record_.steps;
    if (state_.phase == ShotPhase::Grabbed || result.event) {
      trace_.push_back(state_.effector.position_mm);
    }
    if (result.event) {
      if (const auto* g = std::get_if<GrabEvent>(&*result.event)) {
        record_.grab_ms = g->timestamp_ms;
      } else if (const auto* r = std::get_if<ReleaseEvent>(&*result.event)) {
        finish(*r);
      }
    }
    if (state_.phase != ShotPhase::Scored &&
        state_.effector.timestamp_ms - record_.start_ms >= cfg_.shot_timeout_ms) {
      fail(ErrorCode::ShotTimeout, "no release within the shot timeout");
    }
    return result.event;
  }

  bool finished() const { return state_.phase == ShotPhase::Scored; }
  const ShotState& state() const { return state_; }
  const ShotRecord& record() const { return record_; }
  const std::vector<double>& trace() const { return trace_; }
  const SpringParams& spring() const { return spring_; }
  const DeviceConfig& config() const { return cfg_; }

  /// Marks the shot aborted (timeout, disconnect) and returns the record.
  ShotRecord abort() {
    record_.aborted = true;
    record_.release_ms = state_.effector.timestamp_ms;
    return record_;
  }

 private:
  void finish(const ReleaseEvent& r) {
    record_.release_force_n = r.force_n;
    record_.release_elongation_mm = r.elongation_mm;
    record_.release_ms = r.timestamp_ms;
    const auto outcome = resolve_landing(state_, r.force_n, phys_, board_);
    record_.landing = outcome.landing;
    record_.score = outcome.score;
    const auto pm = path_metrics(trace_);
    record_.path_length_mm = pm.path_length_mm;
    record_.direction_changes = pm.direction_changes;
  }

  SpringParams spring_;
  PhysicsParams phys_;
  TargetBoard board_;
  DeviceConfig cfg_;
  ShotRecord record_;
  ShotState state_;
  std::vector<double> trace_;
};

/// Anything producing one input per step from the current shot state.
template <class D>
concept ShotDriver = requires(D d, const ShotState& s) {
  { d.next_input(s) } -> std::convertible_to<StepInput>;
};

struct ShotResult {
  ShotRecord record;
  std::vector<double> trace;
  ShotState final_state;
};

/// Drives one shot to release with `driver`, then resolves landing and score.
template <ShotDriver Driver>
ShotResult run_shot(Driver& driver, const SpringParams& spring, const PhysicsParams& phys,
                    const TargetBoard& board, const DeviceConfig& cfg, ShotRecord context = {},
                    ShotState start = {}) {
  ShotRunner runner(spring, phys, board, cfg, std::move(context), start);
  while (!runner.finished()) runner.tick(driver.next_input(runner.state()));
  ShotState end = reset_shot(runner.state());
  return {runner.record(), runner.trace(), end};
}

/// Moves to the cube, grabs, pulls straight to a fixed elongation, releases.
struct ScriptedRelease {
  double target_elongation_mm = 90.0;
  double approach_speed_mm_s = 100.0;
  double pull_speed_mm_s = 150.0;
  int step_ms = 1;

  StepInput next_input(const ShotState& s) const {
    const double dt = static_cast<double>(step_ms) / 1000.0;
    auto toward = [dt](double from, double to, double speed) {
      const double v = (to - from) / dt;
      return std::clamp(v, -speed, speed);
    };
    switch (s.phase) {
      case ShotPhase::Approach: {
        if (std::abs(s.effector.position_mm - s.cube_position_mm) <= 1e-9) return {0.0, true};
        return {toward(s.effector.position_mm, s.cube_position_mm, approach_speed_mm_s), false};
      }
      case ShotPhase::Grabbed: {
        const double goal = *s.grab_anchor_mm - target_elongation_mm;
        if (std::abs(s.effector.position_mm - goal) <= 1e-9) return {0.0, false};
        return {toward(s.effector.position_mm, goal, pull_speed_mm_s), true};
      }
      default:
        return {0.0, false};
    }
  }
};

}  // namespace springcurl
