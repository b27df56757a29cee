#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "springcurl/session.hpp"
#include "springcurl/session_io/manifest.hpp"
#include "springcurl/subjects.hpp"

namespace springcurl {

/// Synthetic participant bound to one session manifest.
class SyntheticParticipant {
 public:
  explicit SyntheticParticipant(const session_io::SessionManifest& m)
      : traits_(m.traits), day_gap_days_(m.day_gap_days) {
    require(m.subject.has_value(), ErrorCode::InvalidInput, "manifest has no synthetic subject");
    validate(traits_);
    spec_ = *m.subject;
    validate(spec_.policy);
    rng_.seed(spec_.seed);
    state_ = make_subject_state(spec_.initial_elongation_mm, spec_.mix_weight, m.protocol.home_foot);
  }

  void on_prompt(const ProtocolItem& item) {
    if (const auto* f = std::get_if<FootPrompt>(&item)) {
      state_ = apply_foot_shift(state_, f->to);
    } else if (const auto* p = std::get_if<PhasePrompt>(&item)) {
      if (p->kind == PromptKind::DayBoundary) state_ = apply_day_gap(state_, spec_.policy, day_gap_days_);
    }
  }

  PullPlanDriver begin_shot(const TrialSpec& trial, int step_ms) {
    state_ = enter_spring_context(state_, trial.spring);
    PullPlan plan = plan_shot(state_, spec_.policy, traits_, history_, rng_);
    return PullPlanDriver(std::move(plan), spec_.policy.approach_speed_mm_s, step_ms);
  }

  void on_outcome(const ShotRecord& r) {
    if (r.aborted) return;
    state_ = update_after_outcome(state_, spec_.policy, r.landing, r.release_elongation_mm);
    if (r.phase == PhaseKind::Baseline) state_ = record_baseline(state_, r.release_elongation_mm);
  }

  void on_trial_end() { ++history_.trials_completed; }

  const SubjectState& state() const { return state_; }

 private:
  TraitProfile traits_;
  int day_gap_days_;
  session_io::SubjectSpec spec_;
  SubjectRng rng_;
  SubjectState state_;
  ExposureHistory history_;
};

/// Runs a whole two-day session headless as fast as possible.
inline std::vector<ShotRecord> run_synthetic_session(Session& session, SyntheticParticipant& subject) {
  if (!session.started()) session.start();
  const int step_ms = session.manifest().device.step_ms;
  while (!session.done()) {
    if (session.at_prompt()) {
      subject.on_prompt(session.current());
      session.acknowledge();
      continue;
    }
    const TrialSpec* trial = session.current_trial();
    require(trial != nullptr && session.shot_active(), ErrorCode::ProtocolViolation,
            "session stalled outside a trial");
    const std::size_t trial_position = session.cursor().position();
    PullPlanDriver driver = subject.begin_shot(*trial, step_ms);
    std::optional<ShotRecord> rec;
    while (!rec) rec = session.tick(driver.next_input(session.shot_state()));
    subject.on_outcome(*rec);
    if (session.cursor().position() != trial_position) subject.on_trial_end();
  }
  return session.records();
}

inline std::vector<ShotRecord> simulate_session(const session_io::SessionManifest& manifest,
                                                Session::Sink sink = {}) {
  Session session(manifest, std::move(sink));
  SyntheticParticipant subject(manifest);
  return run_synthetic_session(session, subject);
}

struct CohortConfig {
  int participants = 1;
  std::uint64_t seed = 1;
  /// Optional per-participant traits by position; missing entries are drawn.
  std::vector<TraitProfile> traits;
  PolicyParams policy;
  double mix_weight = 0.3;
  int day_gap_days = 2;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::string participant_label(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%03d", index + 1);
  return buf;
}

/// Manifests for a cohort: conditions rotate LS, GS, AGS; every participant
/// shares the protocol seed, so foot sequences match across the cohort.
inline std::vector<session_io::SessionManifest> make_cohort(const CohortConfig& cfg) {
  require(cfg.participants > 0, ErrorCode::InvalidInput, "need at least one participant");
  SubjectRng rng(splitmix64(cfg.seed));
  boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
  boost::random::uniform_real_distribution<double> signed_unit(-1.0, 1.0);
  boost::random::normal_distribution<double> prior(60.0, 10.0);
  std::vector<session_io::SessionManifest> out;
  for (int i = 0; i < cfg.participants; ++i) {
    session_io::SessionManifest m;
    m.participant_id = participant_label(i);
    m.condition = kAllConditions[static_cast<std::size_t>(i) % kAllConditions.size()];
    m.protocol_seed = cfg.seed;
    m.day_gap_days = cfg.day_gap_days;
    TraitProfile drawn{unit(rng), unit(rng), unit(rng), unit(rng), unit(rng), signed_unit(rng)};
    m.traits = static_cast<std::size_t>(i) < cfg.traits.size() ? cfg.traits[static_cast<std::size_t>(i)]
                                                               : drawn;
    session_io::SubjectSpec s;
    s.policy = cfg.policy;
    s.initial_elongation_mm = std::clamp(prior(rng), 20.0, 120.0);
    s.mix_weight = cfg.mix_weight;
    s.seed = splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(i) + 1));
    m.subject = s;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace springcurl
