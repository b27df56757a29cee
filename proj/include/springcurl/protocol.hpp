#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "springcurl/conditions.hpp"
#include "springcurl/error.hpp"
#include "springcurl/shot_record.hpp"
#include "springcurl/springs.hpp"

namespace springcurl {

struct TrialSpec {
  PhaseKind phase = PhaseKind::Familiarization;
  int trial_index = 0;  ///< within the phase
  int shots_per_trial = 6;
  SpringParams spring;
  bool is_catch = false;
  int foot_position = 1;
  std::optional<int> training_trial_number;

  int day() const { return phase_day(phase); }
  bool is_transfer() const { return is_transfer_phase(phase); }

  friend bool operator==(const TrialSpec&, const TrialSpec&) = default;
};

/// Knobs for the two-day protocol. Defaults give the standard design.
struct ProtocolConfig {
  int familiarization_shots = 4;
  int main_trials_per_phase = 2;
  int shots_per_test_trial = 6;
  int training_blocks = 4;
  int trials_per_block = 7;
  int shots_per_training_trial = 4;
  int washout_trials = 1;
  /// 0-based training-trial indices rendering the linear main spring.
  std::vector<int> catch_indices{4, 9, 13, 18, 22, 27};
  /// Blocks after which the break is mandatory (1-based block number).
  int mandatory_break_after_block = 2;
  /// Foot strip used outside training (the second strip).
  int home_foot = 1;

  int training_trials() const { return training_blocks * trials_per_block; }

  friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

struct SessionPlan {
  std::string participant_id;
  GroupCondition condition = GroupCondition::Linear;
  std::uint64_t seed = 0;
  std::vector<TrialSpec> trials;
  /// One strip index per training trial.
  std::vector<int> foot_sequence;
  ProtocolConfig config;

  int total_shots(int day) const {
    int n = 0;
    for (const auto& t : trials) {
      if (t.day() == day) n += t.shots_per_trial;
    }
    return n;
  }
};

/// Strip sequence for the training trials: starts on the home strip and walks
/// a seeded stream of permutations of {0,1,2} with no immediate repeats.
/// Depends only on the protocol seed.
inline std::vector<int> foot_sequence(std::uint64_t protocol_seed, int count, int home_foot = 1) {
  std::vector<int> seq;
  if (count <= 0) return seq;
  seq.reserve(static_cast<std::size_t>(count));
  seq.push_back(home_foot);
  std::mt19937_64 rng(protocol_seed ^ 0x5f0f00715eedULL);
  std::array<int, 3> block{0, 1, 2};
  while (static_cast<int>(seq.size()) < count) {
    // Fisher-Yates with explicit draws keeps the stream portable across std libs.
    for (std::size_t i = block.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(block[i], block[j]);
    }
    if (block[0] == seq.back()) continue;
    for (int f : block) {
      if (static_cast<int>(seq.size()) == count) break;
      seq.push_back(f);
    }
  }
  return seq;
}

inline SessionPlan build_plan(std::string participant_id, GroupCondition condition,
                              std::uint64_t protocol_seed, ProtocolConfig cfg = {}) {
  require(cfg.training_blocks > 0 && cfg.trials_per_block > 0, ErrorCode::InvalidInput,
          "training needs at least one block and trial");
  SessionPlan plan;
  plan.participant_id = std::move(participant_id);
  plan.condition = condition;
  plan.seed = protocol_seed;
  plan.config = cfg;
  plan.foot_sequence = foot_sequence(protocol_seed, cfg.training_trials(), cfg.home_foot);

  const SpringParams linear_main = main_spring(SpringKind::Linear);
  const SpringParams linear_transfer = transfer_spring(SpringKind::Linear);
  const SpringParams trained = main_spring(training_spring_kind(condition));

  auto add_phase = [&](PhaseKind phase, int trials, int shots, const SpringParams& spring) {
    for (int t = 0; t < trials; ++t) {
      TrialSpec spec;
      spec.phase = phase;
      spec.trial_index = t;
      spec.shots_per_trial = shots;
      spec.spring = spring;
      spec.foot_position = cfg.home_foot;
      plan.trials.push_back(spec);
    }
  };

  add_phase(PhaseKind::Familiarization, 1, cfg.familiarization_shots, linear_main);
  add_phase(PhaseKind::Baseline, cfg.main_trials_per_phase, cfg.shots_per_test_trial, linear_main);
  add_phase(PhaseKind::BaselineTransfer, cfg.main_trials_per_phase, cfg.shots_per_test_trial,
            linear_transfer);
  for (int t = 0; t < cfg.training_trials(); ++t) {
    TrialSpec spec;
    spec.phase = PhaseKind::Training;
    spec.trial_index = t;
    spec.shots_per_trial = cfg.shots_per_training_trial;
    spec.is_catch = std::find(cfg.catch_indices.begin(), cfg.catch_indices.end(), t) !=
                    cfg.catch_indices.end();
    spec.spring = spec.is_catch ? linear_main : trained;
    spec.foot_position = plan.foot_sequence[static_cast<std::size_t>(t)];
    spec.training_trial_number = t;
    plan.trials.push_back(spec);
  }
  add_phase(PhaseKind::Washout, cfg.washout_trials, cfg.shots_per_test_trial, linear_main);
  add_phase(PhaseKind::ShortRetention, cfg.main_trials_per_phase, cfg.shots_per_test_trial,
            linear_main);
  add_phase(PhaseKind::ShortRetentionTransfer, cfg.main_trials_per_phase, cfg.shots_per_test_trial,
            linear_transfer);
  add_phase(PhaseKind::LongRetention, cfg.main_trials_per_phase, cfg.shots_per_test_trial,
            linear_main);
  add_phase(PhaseKind::LongRetentionTransfer, cfg.main_trials_per_phase, cfg.shots_per_test_trial,
            linear_transfer);
  return plan;
}

// ---------------------------------------------------------------------------
// Protocol execution

enum class PromptKind { PhaseStart, Questionnaire, Break, DayBoundary };

inline std::string_view to_string(PromptKind k) {
  switch (k) {
    case PromptKind::PhaseStart: return "PhaseStart";
    case PromptKind::Questionnaire: return "Questionnaire";
    case PromptKind::Break: return "Break";
    case PromptKind::DayBoundary: return "DayBoundary";
  }
  return "?";
}

struct PhasePrompt {
  PromptKind kind = PromptKind::PhaseStart;
  PhaseKind phase = PhaseKind::Familiarization;  ///< phase being entered or just finished
  bool mandatory = false;
  friend bool operator==(const PhasePrompt&, const PhasePrompt&) = default;
};

struct FootPrompt {
  int from = 1;
  int to = 1;
  friend bool operator==(const FootPrompt&, const FootPrompt&) = default;
};

struct TrialItem {
  std::size_t trial = 0;  ///< index into SessionPlan::trials
  friend bool operator==(const TrialItem&, const TrialItem&) = default;
};

struct Done {
  friend bool operator==(const Done&, const Done&) = default;
};

using ProtocolItem = std::variant<TrialItem, PhasePrompt, FootPrompt, Done>;

/// Flattens a plan into the ordered stream of trials and prompts.
inline std::vector<ProtocolItem> compile_items(const SessionPlan& plan) {
  std::vector<ProtocolItem> items;
  const auto& cfg = plan.config;
  std::optional<PhaseKind> current;
  int foot = cfg.home_foot;
  for (std::size_t i = 0; i < plan.trials.size(); ++i) {
    const TrialSpec& t = plan.trials[i];
    if (current != t.phase) {
      if (current) {
        const PhaseKind done = *current;
        if (done == PhaseKind::Baseline || done == PhaseKind::ShortRetention ||
            done == PhaseKind::LongRetention || done == PhaseKind::Training) {
          items.push_back(PhasePrompt{PromptKind::Questionnaire, done, false});
        }
        if (phase_day(done) != t.day()) {
          items.push_back(PhasePrompt{PromptKind::DayBoundary, done, true});
        }
      }
      items.push_back(PhasePrompt{PromptKind::PhaseStart, t.phase, false});
      current = t.phase;
    }
    if (t.foot_position != foot) {
      items.push_back(FootPrompt{foot, t.foot_position});
      foot = t.foot_position;
    }
    items.push_back(TrialItem{i});

    // Foot prompts come right after a training trial, then any block break.
    if (t.phase == PhaseKind::Training && t.training_trial_number) {
      const int n = *t.training_trial_number;
      const bool has_next = i + 1 < plan.trials.size();
      if (has_next && plan.trials[i + 1].foot_position != foot) {
        items.push_back(FootPrompt{foot, plan.trials[i + 1].foot_position});
        foot = plan.trials[i + 1].foot_position;
      }
      const int block = n / cfg.trials_per_block + 1;
      if ((n + 1) % cfg.trials_per_block == 0 && block < cfg.training_blocks) {
        items.push_back(PhasePrompt{PromptKind::Break, PhaseKind::Training,
                                    block == cfg.mandatory_break_after_block});
      }
    }
  }
  items.push_back(Done{});
  return items;
}

/// Single-owner cursor over a compiled plan.
class ProtocolCursor {
 public:
  explicit ProtocolCursor(const SessionPlan& plan) : items_(compile_items(plan)) {}

  const ProtocolItem& peek() const {
    require(position_ < items_.size(), ErrorCode::ProtocolViolation, "cursor past Done");
    return items_[position_];
  }

  /// Returns the current item and moves past it.
  ProtocolItem advance() {
    const ProtocolItem item = peek();
    ++position_;
    return item;
  }

  bool done() const { return position_ >= items_.size(); }
  std::size_t position() const { return position_; }
  void seek(std::size_t position) {
    require(position <= items_.size(), ErrorCode::ProtocolViolation, "seek outside the plan");
    position_ = position;
  }
  const std::vector<ProtocolItem>& items() const { return items_; }

 private:
  std::vector<ProtocolItem> items_;
  std::size_t position_ = 0;
};

inline ProtocolItem advance(const SessionPlan&, ProtocolCursor& cursor) { return cursor.advance(); }

// ---------------------------------------------------------------------------
// Scoring display

struct ScoreTotals {
  int trial_score = 0;
  int total_score = 0;
  friend bool operator==(const ScoreTotals&, const ScoreTotals&) = default;
};

/// Running scores as shown to the participant.
class Scoreboard {
 public:
  void begin_trial() { totals_.trial_score = 0; }
  void add(int points) {
    totals_.trial_score += points;
    totals_.total_score += points;
  }
  const ScoreTotals& totals() const { return totals_; }

 private:
  ScoreTotals totals_;
};

/// Scores after an ordered list of shots: the trial score covers the trial
/// of the last record.
inline ScoreTotals scoreboard(std::span<const ShotRecord> records) {
  Scoreboard board;
  const ShotRecord* prev = nullptr;
  for (const auto& r : records) {
    if (!prev || prev->phase != r.phase || prev->trial_index != r.trial_index) board.begin_trial();
    if (!r.aborted) board.add(r.score);
    prev = &r;
  }
  return board.totals();
}

}  // namespace springcurl
