#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "springcurl/session.hpp"
#include "springcurl/session_io/events.hpp"
#include "springcurl/service/wire.hpp"

namespace springcurl::service {

struct LiveConfig {
  double slide_speed = 25.0;  ///< game-units per second before acceleration
  double slide_acceleration = 20.0;
  std::int64_t score_display_ms = 3000;
  double max_pointer_speed_mm_s = 2000.0;
  int snapshot_hz = 60;
};

/// Outgoing message with its audience. Snapshots are droppable; the rest are not.
struct Outgoing {
  enum class Audience { All, Experimenters };
  Audience audience = Audience::All;
  json body;
};

/// Live protocol state owned by the session executor. Applies client
/// messages, advances the engine one step at a time and produces snapshots.
/// Has no clock of its own, so tests drive it step by step.
class LiveSession {
 public:
  using Sink = Session::Sink;

  LiveSession(session_io::SessionManifest manifest, Sink log_sink, LiveConfig cfg = {})
      : manifest_(std::move(manifest)), log_sink_(std::move(log_sink)), cfg_(cfg) {}

  const session_io::SessionManifest& manifest() const { return manifest_; }
  const Session* session() const { return session_ ? &*session_ : nullptr; }
  bool paused() const { return paused_; }
  bool participant_connected() const { return participant_connected_; }
  const LiveConfig& config() const { return cfg_; }

  /// Applies one client message; returns a rejection reason when refused.
  std::optional<std::string> handle(const ClientMessage& m, Role role) {
    if (is_experimenter_command(m) && role != Role::Experimenter) {
      return "experimenter role required";
    }
    return std::visit([&](const auto& x) { return apply(x, role); }, m);
  }

  void set_participant_connected(bool connected) {
    participant_connected_ = connected;
    if (connected) {
      if (session_ && session_->at_prompt()) push(prompt_message(session_->current()));
      return;
    }
    button_ = false;
    if (session_ && session_->shot_active() && session_->shot_state().phase == ShotPhase::Grabbed) {
      session_->abort_shot("disconnect");
      pointer_target_.reset();
    }
  }

  /// One engine step (DeviceConfig::step_ms of session time).
  void step() {
    if (!session_ || session_->done() || paused_) return;
    if (display_remaining_ms_ > 0) {
      display_remaining_ms_ -= manifest_.device.step_ms;
      animation_elapsed_ms_ += manifest_.device.step_ms;
      if (display_remaining_ms_ <= 0) {
        display_remaining_ms_ = 0;
        animation_.reset();
      }
      if (session_->shot_active()) session_->tick({0.0, false});
      return;
    }
    if (!session_->shot_active()) return;
    if (!participant_connected_) return;
    const double dt = static_cast<double>(manifest_.device.step_ms) / 1000.0;
    double v = 0.0;
    if (pointer_target_) {
      v = std::clamp((*pointer_target_ - session_->effector().position_mm) / dt,
                     -cfg_.max_pointer_speed_mm_s, cfg_.max_pointer_speed_mm_s);
    }
    const auto rec = session_->tick({v, button_});
    if (rec) on_shot_finished(*rec);
  }

  json snapshot() const {
    json j = envelope("snapshot");
    j["paused"] = paused_;
    j["participant_connected"] = participant_connected_;
    j["condition"] = manifest_.condition;
    if (!session_) {
      j["state"] = "not_started";
      j["cursor_position"] = 0;
      j["cube_visible"] = false;
      j["sphere_visible"] = false;
      j["elongation_hidden"] = true;
      j["trial_score"] = 0;
      j["total_score"] = 0;
      j["landing_animation"] = nullptr;
      return j;
    }
    const Session& s = *session_;
    j["t_ms"] = s.clock_ms();
    j["day"] = s.day();
    j["cursor_position"] = s.cursor().position();
    j["trial_score"] = s.scores().trial_score;
    j["total_score"] = s.scores().total_score;
    j["state"] = s.done() ? "done" : s.at_prompt() ? "prompt" : display_remaining_ms_ > 0 ? "result" : "shot";
    if (const TrialSpec* t = s.current_trial()) {
      j["phase"] = t->phase;
      j["trial_index"] = t->trial_index;
      j["shot"] = s.shot_number();
      j["foot_position"] = t->foot_position;
    }
    const bool grabbed = s.shot_active() && s.shot_state().phase == ShotPhase::Grabbed;
    j["shot_phase"] = s.shot_active() ? std::string(to_string(s.shot_state().phase)) : "Idle";
    // While grabbed the participant sees neither cube nor sphere, only the force.
    j["cube_visible"] = !grabbed;
    j["sphere_visible"] = !grabbed;
    j["elongation_hidden"] = true;
    j["force_n"] = s.effector().rendered_force_n;
    if (grabbed) {
      j["cube_mm"] = nullptr;
      j["sphere_mm"] = nullptr;
    } else {
      j["cube_mm"] = s.shot_active() ? s.shot_state().cube_position_mm : 0.0;
      j["sphere_mm"] = s.effector().position_mm;
    }
    if (animation_) {
      json a = *animation_;
      a["elapsed_s"] = static_cast<double>(animation_elapsed_ms_) / 1000.0;
      j["landing_animation"] = a;
    } else {
      j["landing_animation"] = nullptr;
    }
    return j;
  }

  /// Non-droppable messages produced since the last drain.
  std::vector<Outgoing> drain() {
    std::vector<Outgoing> out;
    out.swap(outbox_);
    return out;
  }

  /// Seconds the ×20 slide animation takes for a landing distance.
  double animation_duration_s(double landing) const {
    return landing / (cfg_.slide_speed * cfg_.slide_acceleration);
  }

 private:
  std::optional<std::string> apply(const msg::Move& m, Role role) {
    if (role != Role::Participant) return "only the participant moves the cursor";
    pointer_target_ = m.x_mm;
    return std::nullopt;
  }

  std::optional<std::string> apply(const msg::ButtonDown&, Role role) {
    if (role != Role::Participant) return "only the participant presses the button";
    if (!session_) return "session not started";
    if (session_->at_prompt() && std::holds_alternative<FootPrompt>(session_->current())) {
      session_->acknowledge();
      after_cursor_move();
      return std::nullopt;
    }
    if (paused_) return "session paused";
    button_ = true;
    return std::nullopt;
  }

  std::optional<std::string> apply(const msg::ButtonUp&, Role role) {
    if (role != Role::Participant) return "only the participant presses the button";
    button_ = false;
    return std::nullopt;
  }

  std::optional<std::string> apply(const msg::Advance&, Role) {
    if (!session_) {
      session_.emplace(manifest_, [this](const session_io::SessionEvent& e) { on_event(e); });
      session_->start();
      after_cursor_move();
      return std::nullopt;
    }
    if (session_->done()) return "session finished";
    if (!session_->at_prompt()) return "no prompt to advance";
    session_->acknowledge();
    after_cursor_move();
    return std::nullopt;
  }

  std::optional<std::string> apply(const msg::Pause&, Role) {
    paused_ = true;
    button_ = false;
    return std::nullopt;
  }

  std::optional<std::string> apply(const msg::Resume&, Role) {
    paused_ = false;
    return std::nullopt;
  }

  std::optional<std::string> apply(const msg::AssignCondition& m, Role) {
    if (session_) return "condition can only be assigned before the session starts";
    manifest_.condition = m.condition;
    return std::nullopt;
  }

  void after_cursor_move() {
    if (session_ && session_->at_prompt()) push(prompt_message(session_->current()));
  }

  void on_shot_finished(const ShotRecord& rec) {
    button_ = false;
    if (rec.aborted) return;
    json r = envelope("shot_result");
    r["shot"] = rec.shot_number;
    r["landing"] = rec.landing;
    r["points"] = rec.score;
    r["force_n"] = rec.release_force_n;
    r["elongation_mm"] = rec.release_elongation_mm;
    r["trial_score"] = session_->scores().trial_score;
    r["total_score"] = session_->scores().total_score;
    push(std::move(r));
    animation_ = json{{"distance", rec.landing}, {"duration_s", animation_duration_s(rec.landing)}};
    animation_elapsed_ms_ = 0;
    display_remaining_ms_ =
        static_cast<std::int64_t>(std::ceil(animation_duration_s(rec.landing) * 1000.0)) + cfg_.score_display_ms;
    if (session_->at_prompt()) push(prompt_message(session_->current()));
  }

  void on_event(const session_io::SessionEvent& e) {
    if (log_sink_) log_sink_(e);
    json j = envelope("event");
    j["event"] = session_io::to_json_line(e);
    outbox_.push_back({Outgoing::Audience::Experimenters, std::move(j)});
  }

  void push(json body) { outbox_.push_back({Outgoing::Audience::All, std::move(body)}); }

  session_io::SessionManifest manifest_;
  Sink log_sink_;
  LiveConfig cfg_;
  std::optional<Session> session_;
  bool paused_ = false;
  bool participant_connected_ = false;
  bool button_ = false;
  std::optional<double> pointer_target_;
  std::optional<json> animation_;
  std::int64_t animation_elapsed_ms_ = 0;
  std::int64_t display_remaining_ms_ = 0;
  std::vector<Outgoing> outbox_;
};

}  // namespace springcurl::service
