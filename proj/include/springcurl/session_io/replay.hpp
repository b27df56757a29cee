#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "springcurl/engine.hpp"
#include "springcurl/metrics.hpp"
#include "springcurl/physics.hpp"
#include "springcurl/session_io/events.hpp"

namespace springcurl::session_io {

struct ReplayMismatch {
  std::uint64_t seq = 0;
  std::string what;
  double logged = 0.0;
  double recomputed = 0.0;
};

struct ReplayResult {
  std::vector<ShotRecord> records;  ///< completed shots only
  std::vector<TrialAggregate> aggregates;
  std::vector<ReplayMismatch> mismatches;
  std::vector<std::string> warnings;

  bool consistent() const { return mismatches.empty(); }
};

/// Rebuilds shot records from a log, recomputing force, landing, score and
/// trial aggregates from the logged release elongations and checking them
/// against the logged values.
inline ReplayResult replay(std::span<const SessionEvent> events, double tolerance = 1e-9) {
  ReplayResult out;
  std::optional<SessionManifest> manifest;
  std::optional<TrialSpec> trial;
  std::vector<ShotRecord> trial_records;
  std::optional<ShotRecord> pending;
  bool have_release = false;

  auto check = [&](std::uint64_t seq, const char* what, double logged, double recomputed) {
    if (!(std::abs(logged - recomputed) <= tolerance)) {
      out.mismatches.push_back({seq, what, logged, recomputed});
    }
  };
  auto drop_pending = [&](const char* why) {
    if (pending) {
      out.warnings.push_back(std::string("incomplete shot skipped: ") + why);
      pending.reset();
    }
    have_release = false;
  };

  for (const auto& e : events) {
    std::visit(
        [&](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, ev::SessionStarted>) {
            manifest = b.manifest;
          } else if constexpr (std::is_same_v<T, ev::TrialStarted>) {
            drop_pending("new trial began");
            trial = b.trial;
            trial_records.clear();
          } else if constexpr (std::is_same_v<T, ev::Grab>) {
            drop_pending("grab before previous shot scored");
            require(manifest && trial, ErrorCode::SchemaMismatch, "Grab outside a trial");
            ShotRecord r;
            r.participant_id = manifest->participant_id;
            r.condition = manifest->condition;
            r.phase = trial->phase;
            r.trial_index = trial->trial_index;
            r.training_trial_number = trial->training_trial_number;
            r.shot_number = b.shot;
            r.spring_kind = trial->spring.kind;
            r.target_force_n = trial->spring.target_force_n;
            r.target_elongation_mm = trial->spring.target_elongation_mm;
            r.is_catch = trial->is_catch;
            r.is_transfer = trial->is_transfer();
            r.foot_position = trial->foot_position;
            r.grab_ms = e.t_ms;
            pending = r;
          } else if constexpr (std::is_same_v<T, ev::Release>) {
            if (!pending) return;
            const double force = rendered_force(trial->spring, b.elongation_mm, manifest->device);
            check(e.seq, "release force", b.force_n, force);
            pending->release_force_n = force;
            pending->release_elongation_mm = b.elongation_mm;
            pending->path_length_mm = b.path_length_mm;
            pending->direction_changes = b.direction_changes;
            pending->steps = b.steps;
            pending->release_ms = e.t_ms;
            have_release = true;
          } else if constexpr (std::is_same_v<T, ev::Landed>) {
            if (!pending || !have_release) return;
            pending->landing = travel_distance(manifest->physics, pending->release_force_n);
            check(e.seq, "landing", b.distance, pending->landing);
          } else if constexpr (std::is_same_v<T, ev::Scored>) {
            if (!pending || !have_release) return;
            pending->score = score_for_distance(manifest->board, pending->landing);
            check(e.seq, "score", b.points, pending->score);
            out.records.push_back(*pending);
            trial_records.push_back(*pending);
            pending.reset();
            have_release = false;
          } else if constexpr (std::is_same_v<T, ev::ShotAborted>) {
            pending.reset();
            have_release = false;
          } else if constexpr (std::is_same_v<T, ev::TrialEnded>) {
            drop_pending("trial ended mid-shot");
            const auto agg = aggregate_trial(trial_records);
            check(e.seq, "completed shots", b.completed_shots, static_cast<double>(trial_records.size()));
            if (agg) {
              out.aggregates.push_back(*agg);
              if (b.mean_abs_force_error_n && b.force_sd_n && b.mean_abs_elongation_error_mm) {
                check(e.seq, "mean |force error|", *b.mean_abs_force_error_n, agg->mean_abs_force_error_n);
                check(e.seq, "force SD", *b.force_sd_n, agg->force_sd_n);
                check(e.seq, "mean |elongation error|", *b.mean_abs_elongation_error_mm,
                      agg->mean_abs_elongation_error_mm);
              } else {
                out.mismatches.push_back({e.seq, "aggregate missing from log", 0.0, 0.0});
              }
            } else if (b.force_sd_n) {
              out.mismatches.push_back({e.seq, "aggregate logged for a trial below two shots", 0.0, 0.0});
            }
            trial.reset();
            trial_records.clear();
          }
        },
        e.body);
  }
  drop_pending("log ended");
  return out;
}

}  // namespace springcurl::session_io
