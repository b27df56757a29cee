#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "springcurl/engine.hpp"
#include "springcurl/metrics.hpp"
#include "springcurl/protocol.hpp"
#include "springcurl/session_io/events.hpp"

namespace springcurl {

/// Keeps every `stride`-th sample plus the last one.
inline std::vector<double> decimate(std::span<const double> samples, std::size_t stride) {
  std::vector<double> out;
  if (samples.empty()) return out;
  stride = std::max<std::size_t>(stride, 1);
  for (std::size_t i = 0; i < samples.size(); i += stride) out.push_back(samples[i]);
  if ((samples.size() - 1) % stride != 0) out.push_back(samples.back());
  return out;
}

/// Protocol executor: walks the compiled plan, runs each shot through a
/// ShotRunner and emits the session's event stream. Inputs come from a
/// synthetic subject or a live participant; both use this class.
class Session {
 public:
  using Sink = std::function<void(const session_io::SessionEvent&)>;

  Session(session_io::SessionManifest manifest, Sink sink)
      : manifest_(std::move(manifest)),
        plan_(manifest_.plan()),
        cursor_(plan_),
        sink_(std::move(sink)) {
    validate(manifest_.physics);
    validate(manifest_.board);
    validate(manifest_.device);
  }

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  void start() {
    require(!started_, ErrorCode::ProtocolViolation, "session already started");
    started_ = true;
    day_ = 1;
    emit(session_io::ev::SessionStarted{manifest_, day_});
    enter_current();
  }

  bool started() const { return started_; }
  bool done() const { return finished_; }
  int day() const { return day_; }
  std::int64_t clock_ms() const { return effector_.timestamp_ms; }

  const session_io::SessionManifest& manifest() const { return manifest_; }
  const SessionPlan& plan() const { return plan_; }
  const ProtocolCursor& cursor() const { return cursor_; }
  const ProtocolItem& current() const { return cursor_.peek(); }
  const std::vector<ShotRecord>& records() const { return records_; }
  const ScoreTotals& scores() const { return scoreboard_.totals(); }

  bool at_prompt() const {
    return started_ && !finished_ &&
           (std::holds_alternative<PhasePrompt>(current()) ||
            std::holds_alternative<FootPrompt>(current()));
  }
  bool shot_active() const { return runner_.has_value(); }

  const TrialSpec* current_trial() const {
    if (!started_ || finished_) return nullptr;
    const auto* item = std::get_if<TrialItem>(&current());
    return item ? &plan_.trials[item->trial] : nullptr;
  }
  int shot_number() const { return shot_number_; }
  const ShotState& shot_state() const {
    require(runner_.has_value(), ErrorCode::ProtocolViolation, "no shot in progress");
    return runner_->state();
  }
  /// Elongation the effector would produce right now (0 outside a grab).
  double current_elongation() const { return runner_ ? elongation(runner_->state()) : 0.0; }
  const EndEffectorState& effector() const { return effector_; }

  /// Moves past the current prompt.
  void acknowledge() {
    require(at_prompt(), ErrorCode::ProtocolViolation, "nothing to acknowledge");
    const ProtocolItem item = cursor_.advance();
    if (const auto* p = std::get_if<PhasePrompt>(&item)) {
      if (p->kind == PromptKind::DayBoundary) {
        day_ = 2;
        seq_ = 0;
        emit(session_io::ev::SessionStarted{manifest_, day_});
      } else if (p->kind == PromptKind::PhaseStart) {
        emit(session_io::ev::PhaseEntered{p->phase});
      }
    }
    enter_current();
  }

  /// Advances the clock without engine work (prompts, score display).
  void idle(std::int64_t ms) {
    require(ms >= 0, ErrorCode::InvalidInput, "idle time must be non-negative");
    require(!runner_, ErrorCode::ProtocolViolation, "cannot idle during a shot");
    effector_.timestamp_ms += ms;
  }

  /// One engine step of the active shot. Returns the record when the shot ends,
  /// including aborted-by-timeout records (the shot is then retried).
  std::optional<ShotRecord> tick(const StepInput& input) {
    require(runner_.has_value(), ErrorCode::ProtocolViolation, "no shot in progress");
    std::optional<ShotEvent> event;
    try {
      event = runner_->tick(input);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ShotTimeout) throw;
      effector_ = runner_->state().effector;
      return abort_shot("timeout");
    }
    effector_ = runner_->state().effector;
    if (event) {
      if (const auto* g = std::get_if<GrabEvent>(&*event)) {
        emit(session_io::ev::Grab{shot_number_, g->anchor_mm}, g->timestamp_ms);
      }
    }
    if (!runner_->finished()) return std::nullopt;
    return complete_shot();
  }

  /// Drops the active shot (disconnect, timeout) and restarts the same shot.
  ShotRecord abort_shot(const std::string& reason) {
    require(runner_.has_value(), ErrorCode::ProtocolViolation, "no shot in progress");
    ShotRecord rec = runner_->abort();
    effector_.button_pressed = false;
    effector_.rendered_force_n = 0.0;
    records_.push_back(rec);
    trial_records_.push_back(rec);
    emit(session_io::ev::ShotAborted{shot_number_, reason});
    start_shot();
    return rec;
  }

 private:
  void emit(session_io::EventBody body, std::optional<std::int64_t> t = std::nullopt) {
    session_io::SessionEvent e{seq_++, t.value_or(clock_ms()), std::move(body)};
    if (sink_) sink_(e);
  }

  void enter_current() {
    const ProtocolItem& item = cursor_.peek();
    if (const auto* t = std::get_if<TrialItem>(&item)) {
      emit(session_io::ev::TrialStarted{t->trial, plan_.trials[t->trial]});
      scoreboard_.begin_trial();
      trial_records_.clear();
      shot_number_ = 0;
      start_shot();
    } else if (const auto* f = std::get_if<FootPrompt>(&item)) {
      emit(session_io::ev::FootPrompt{f->from, f->to});
    } else if (const auto* p = std::get_if<PhasePrompt>(&item)) {
      if (p->kind == PromptKind::DayBoundary) {
        emit(session_io::ev::SessionEnded{day_, scores().total_score});
      }
    } else if (std::holds_alternative<Done>(item)) {
      emit(session_io::ev::SessionEnded{day_, scores().total_score});
      finished_ = true;
    }
  }

  void start_shot() {
    const auto& item = std::get<TrialItem>(cursor_.peek());
    const TrialSpec& t = plan_.trials[item.trial];
    ShotRecord ctx;
    ctx.participant_id = manifest_.participant_id;
    ctx.condition = manifest_.condition;
    ctx.phase = t.phase;
    ctx.trial_index = t.trial_index;
    ctx.training_trial_number = t.training_trial_number;
    ctx.shot_number = shot_number_;
    ctx.spring_kind = t.spring.kind;
    ctx.target_force_n = t.spring.target_force_n;
    ctx.target_elongation_mm = t.spring.target_elongation_mm;
    ctx.is_catch = t.is_catch;
    ctx.is_transfer = t.is_transfer();
    ctx.foot_position = t.foot_position;
    ShotState start;
    start.effector = effector_;
    start.effector.button_pressed = false;
    start.effector.rendered_force_n = 0.0;
    runner_.emplace(t.spring, manifest_.physics, manifest_.board, manifest_.device, ctx, start);
  }

  ShotRecord complete_shot() {
    const ShotRecord rec = runner_->record();
    const auto& dev = manifest_.device;
    const auto stride = static_cast<std::size_t>(
        std::max(1, 1000 / std::max(1, dev.step_ms * dev.trace_hz)));
    emit(session_io::ev::TraceChunk{shot_number_, dev.trace_hz, decimate(runner_->trace(), stride)},
         rec.release_ms);
    emit(session_io::ev::Release{shot_number_, rec.release_force_n, rec.release_elongation_mm,
                                 rec.path_length_mm, rec.direction_changes, rec.steps},
         rec.release_ms);
    emit(session_io::ev::Landed{shot_number_, rec.landing}, rec.release_ms);
    scoreboard_.add(rec.score);
    emit(session_io::ev::Scored{shot_number_, rec.score, scores().trial_score, scores().total_score},
         rec.release_ms);
    effector_ = reset_shot(runner_->state()).effector;
    runner_.reset();
    records_.push_back(rec);
    trial_records_.push_back(rec);

    ++shot_number_;
    const auto& item = std::get<TrialItem>(cursor_.peek());
    if (shot_number_ < plan_.trials[item.trial].shots_per_trial) {
      start_shot();
    } else {
      end_trial(item.trial);
    }
    return rec;
  }

  void end_trial(std::size_t plan_index) {
    session_io::ev::TrialEnded e;
    e.plan_index = plan_index;
    for (const auto& r : trial_records_) e.completed_shots += r.aborted ? 0 : 1;
    if (const auto agg = aggregate_trial(trial_records_)) {
      e.mean_abs_force_error_n = agg->mean_abs_force_error_n;
      e.force_sd_n = agg->force_sd_n;
      e.mean_abs_elongation_error_mm = agg->mean_abs_elongation_error_mm;
    }
    emit(std::move(e));
    cursor_.advance();
    enter_current();
  }

  session_io::SessionManifest manifest_;
  SessionPlan plan_;
  ProtocolCursor cursor_;
  Sink sink_;

  bool started_ = false;
  bool finished_ = false;
  int day_ = 1;
  std::uint64_t seq_ = 0;
  EndEffectorState effector_;
  std::optional<ShotRunner> runner_;
  int shot_number_ = 0;
  Scoreboard scoreboard_;
  std::vector<ShotRecord> records_;
  std::vector<ShotRecord> trial_records_;
};

}  // namespace springcurl
