#pragma once

#include <string>

#include <json.hpp>

#include "springcurl/conditions.hpp"
#include "springcurl/engine.hpp"
#include "springcurl/metrics.hpp"
#include "springcurl/physics.hpp"
#include "springcurl/protocol.hpp"
#include "springcurl/shot_record.hpp"
#include "springcurl/springs.hpp"
#include "springcurl/subjects.hpp"

// JSON mappings for the value types that appear in manifests, plans and logs.

namespace springcurl {

using json = nlohmann::json;

inline void to_json(json& j, SpringKind k) { j = std::string(to_string(k)); }
inline void from_json(const json& j, SpringKind& k) { k = parse_spring_kind(j.get<std::string>()); }

inline void to_json(json& j, GroupCondition c) { j = std::string(to_string(c)); }
inline void from_json(const json& j, GroupCondition& c) { c = parse_condition(j.get<std::string>()); }

inline void to_json(json& j, PhaseKind p) { j = std::string(to_string(p)); }
inline void from_json(const json& j, PhaseKind& p) { p = parse_phase(j.get<std::string>()); }

inline void to_json(json& j, const SpringParams& p) {
  j = {{"kind", p.kind},
       {"target_force_n", p.target_force_n},
       {"target_elongation_mm", p.target_elongation_mm},
       {"gaussian_width_mm", p.gaussian_width_mm}};
}
inline void from_json(const json& j, SpringParams& p) {
  j.at("kind").get_to(p.kind);
  j.at("target_force_n").get_to(p.target_force_n);
  j.at("target_elongation_mm").get_to(p.target_elongation_mm);
  j.at("gaussian_width_mm").get_to(p.gaussian_width_mm);
}

inline void to_json(json& j, const PhysicsParams& p) {
  j = {{"cube_mass_kg", p.cube_mass_kg},
       {"gravity_mps2", p.gravity_mps2},
       {"friction_coeff", p.friction_coeff},
       {"frame_update_s", p.frame_update_s},
       {"calibration", p.calibration}};
}
inline void from_json(const json& j, PhysicsParams& p) {
  j.at("cube_mass_kg").get_to(p.cube_mass_kg);
  j.at("gravity_mps2").get_to(p.gravity_mps2);
  j.at("friction_coeff").get_to(p.friction_coeff);
  j.at("frame_update_s").get_to(p.frame_update_s);
  j.at("calibration").get_to(p.calibration);
}

inline void to_json(json& j, const TargetBoard& b) {
  j = {{"center_distance", b.center_distance},
       {"board_radius", b.board_radius},
       {"ring_points", b.ring_points},
       {"ring_boundaries", b.ring_boundaries}};
}
inline void from_json(const json& j, TargetBoard& b) {
  j.at("center_distance").get_to(b.center_distance);
  j.at("board_radius").get_to(b.board_radius);
  j.at("ring_points").get_to(b.ring_points);
  j.at("ring_boundaries").get_to(b.ring_boundaries);
}

inline void to_json(json& j, const DeviceConfig& c) {
  j = {{"step_ms", c.step_ms},
       {"force_limit_n", c.force_limit_n},
       {"lateral_stiffness_n_per_mm", c.lateral_stiffness_n_per_mm},
       {"grab_radius_mm", c.grab_radius_mm},
       {"shot_timeout_ms", c.shot_timeout_ms},
       {"trace_hz", c.trace_hz}};
}
inline void from_json(const json& j, DeviceConfig& c) {
  j.at("step_ms").get_to(c.step_ms);
  j.at("force_limit_n").get_to(c.force_limit_n);
  j.at("lateral_stiffness_n_per_mm").get_to(c.lateral_stiffness_n_per_mm);
  j.at("grab_radius_mm").get_to(c.grab_radius_mm);
  j.at("shot_timeout_ms").get_to(c.shot_timeout_ms);
  j.at("trace_hz").get_to(c.trace_hz);
}

inline void to_json(json& j, const ProtocolConfig& c) {
  j = {{"familiarization_shots", c.familiarization_shots},
       {"main_trials_per_phase", c.main_trials_per_phase},
       {"shots_per_test_trial", c.shots_per_test_trial},
       {"training_blocks", c.training_blocks},
       {"trials_per_block", c.trials_per_block},
       {"shots_per_training_trial", c.shots_per_training_trial},
       {"washout_trials", c.washout_trials},
       {"catch_indices", c.catch_indices},
       {"mandatory_break_after_block", c.mandatory_break_after_block},
       {"home_foot", c.home_foot}};
}
inline void from_json(const json& j, ProtocolConfig& c) {
  j.at("familiarization_shots").get_to(c.familiarization_shots);
  j.at("main_trials_per_phase").get_to(c.main_trials_per_phase);
  j.at("shots_per_test_trial").get_to(c.shots_per_test_trial);
  j.at("training_blocks").get_to(c.training_blocks);
  j.at("trials_per_block").get_to(c.trials_per_block);
  j.at("shots_per_training_trial").get_to(c.shots_per_training_trial);
  j.at("washout_trials").get_to(c.washout_trials);
  j.at("catch_indices").get_to(c.catch_indices);
  j.at("mandatory_break_after_block").get_to(c.mandatory_break_after_block);
  j.at("home_foot").get_to(c.home_foot);
}

inline void to_json(json& j, const TrialSpec& t) {
  j = {{"phase", t.phase},
       {"trial_index", t.trial_index},
       {"shots_per_trial", t.shots_per_trial},
       {"spring", t.spring},
       {"is_catch", t.is_catch},
       {"foot_position", t.foot_position},
       {"day", t.day()}};
  j["training_trial_number"] =
      t.training_trial_number ? json(*t.training_trial_number) : json(nullptr);
}
inline void from_json(const json& j, TrialSpec& t) {
  j.at("phase").get_to(t.phase);
  j.at("trial_index").get_to(t.trial_index);
  j.at("shots_per_trial").get_to(t.shots_per_trial);
  j.at("spring").get_to(t.spring);
  j.at("is_catch").get_to(t.is_catch);
  j.at("foot_position").get_to(t.foot_position);
  const auto& n = j.at("training_trial_number");
  t.training_trial_number = n.is_null() ? std::nullopt : std::optional<int>(n.get<int>());
}

inline constexpr const char* kPlanSchema = "plan_v1";

inline void to_json(json& j, const SessionPlan& p) {
  j = {{"schema", kPlanSchema},
       {"participant_id", p.participant_id},
       {"condition", p.condition},
       {"seed", p.seed},
       {"config", p.config},
       {"foot_sequence", p.foot_sequence},
       {"day1_shots", p.total_shots(1)},
       {"day2_shots", p.total_shots(2)},
       {"trials", p.trials}};
}
inline void from_json(const json& j, SessionPlan& p) {
  require(j.at("schema") == kPlanSchema, ErrorCode::SchemaMismatch, "expected plan_v1");
  j.at("participant_id").get_to(p.participant_id);
  j.at("condition").get_to(p.condition);
  j.at("seed").get_to(p.seed);
  j.at("config").get_to(p.config);
  j.at("foot_sequence").get_to(p.foot_sequence);
  j.at("trials").get_to(p.trials);
}

inline void to_json(json& j, const TraitProfile& t) {
  j = {{"free_spirit", t.free_spirit}, {"achiever", t.achiever},   {"challenge", t.challenge},
       {"boredom", t.boredom},         {"curiosity", t.curiosity}, {"locus_of_control", t.locus_of_control}};
}
inline void from_json(const json& j, TraitProfile& t) {
  j.at("free_spirit").get_to(t.free_spirit);
  j.at("achiever").get_to(t.achiever);
  j.at("challenge").get_to(t.challenge);
  j.at("boredom").get_to(t.boredom);
  j.at("curiosity").get_to(t.curiosity);
  j.at("locus_of_control").get_to(t.locus_of_control);
}

inline void to_json(json& j, const PolicyParams& p) {
  j = {{"learning_rate", p.learning_rate},
       {"motor_noise_sd_mm", p.motor_noise_sd_mm},
       {"across_shot_jitter_sd_max_mm", p.across_shot_jitter_sd_max_mm},
       {"within_shot_explore_rate_max", p.within_shot_explore_rate_max},
       {"explore_decay", p.explore_decay},
       {"pull_speed_mm_s", p.pull_speed_mm_s},
       {"approach_speed_mm_s", p.approach_speed_mm_s},
       {"memory_decay_per_day", p.memory_decay_per_day},
       {"probe_amplitude_min_mm", p.probe_amplitude_min_mm},
       {"probe_amplitude_max_mm", p.probe_amplitude_max_mm},
       {"target_distance", p.target_distance},
       {"max_elongation_mm", p.max_elongation_mm},
       {"reset_on_reversal", p.reset_on_reversal}};
}
inline void from_json(const json& j, PolicyParams& p) {
  j.at("learning_rate").get_to(p.learning_rate);
  j.at("motor_noise_sd_mm").get_to(p.motor_noise_sd_mm);
  j.at("across_shot_jitter_sd_max_mm").get_to(p.across_shot_jitter_sd_max_mm);
  j.at("within_shot_explore_rate_max").get_to(p.within_shot_explore_rate_max);
  j.at("explore_decay").get_to(p.explore_decay);
  j.at("pull_speed_mm_s").get_to(p.pull_speed_mm_s);
  j.at("approach_speed_mm_s").get_to(p.approach_speed_mm_s);
  j.at("memory_decay_per_day").get_to(p.memory_decay_per_day);
  j.at("probe_amplitude_min_mm").get_to(p.probe_amplitude_min_mm);
  j.at("probe_amplitude_max_mm").get_to(p.probe_amplitude_max_mm);
  j.at("target_distance").get_to(p.target_distance);
  j.at("max_elongation_mm").get_to(p.max_elongation_mm);
  j.at("reset_on_reversal").get_to(p.reset_on_reversal);
}

inline void to_json(json& j, const TrialAggregate& a) {
  j = {{"completed_shots", a.completed_shots},
       {"mean_abs_force_error_n", a.mean_abs_force_error_n},
       {"force_sd_n", a.force_sd_n},
       {"mean_abs_elongation_error_mm", a.mean_abs_elongation_error_mm}};
}

/// Reads a value, turning any structural problem into a schema-mismatch error.
template <class T>
T decode(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaMismatch, what + ": " + e.what());
  }
}

}  // namespace springcurl
