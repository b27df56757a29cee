#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "springcurl/json.hpp"
#include "springcurl/protocol.hpp"

namespace springcurl::session_io {

inline constexpr const char* kSessionSchema = "session_v1";

/// Synthetic participant settings; absent for live human sessions.
struct SubjectSpec {
  PolicyParams policy;
  double initial_elongation_mm = 60.0;
  double mix_weight = 0.3;
  std::uint64_t seed = 0;

  friend bool operator==(const SubjectSpec&, const SubjectSpec&) = default;
};

/// Everything needed to rerun a session bit-exactly.
struct SessionManifest {
  std::string schema = kSessionSchema;
  std::string participant_id;
  GroupCondition condition = GroupCondition::Linear;
  std::uint64_t protocol_seed = 0;
  ProtocolConfig protocol;
  PhysicsParams physics;
  TargetBoard board;
  DeviceConfig device;
  TraitProfile traits;
  /// Days between the sessions; an annotation for humans, a decay input for subjects.
  int day_gap_days = 2;
  std::optional<SubjectSpec> subject;

  SessionPlan plan() const { return build_plan(participant_id, condition, protocol_seed, protocol); }

  friend bool operator==(const SessionManifest&, const SessionManifest&) = default;
};

inline void to_json(json& j, const SubjectSpec& s) {
  j = {{"policy", s.policy},
       {"initial_elongation_mm", s.initial_elongation_mm},
       {"mix_weight", s.mix_weight},
       {"seed", s.seed}};
}
inline void from_json(const json& j, SubjectSpec& s) {
  j.at("policy").get_to(s.policy);
  j.at("initial_elongation_mm").get_to(s.initial_elongation_mm);
  j.at("mix_weight").get_to(s.mix_weight);
  j.at("seed").get_to(s.seed);
}

inline void to_json(json& j, const SessionManifest& m) {
  j = {{"schema", m.schema},
       {"participant_id", m.participant_id},
       {"condition", m.condition},
       {"seeds", {{"protocol", m.protocol_seed}}},
       {"protocol", m.protocol},
       {"physics", m.physics},
       {"board", m.board},
       {"device", m.device},
       {"traits", m.traits},
       {"day_gap_days", m.day_gap_days}};
  if (m.subject) {
    j["seeds"]["subject"] = m.subject->seed;
    j["subject"] = *m.subject;
  } else {
    j["subject"] = nullptr;
  }
}

inline void from_json(const json& j, SessionManifest& m) {
  j.at("schema").get_to(m.schema);
  require(m.schema == kSessionSchema, ErrorCode::SchemaMismatch,
          "unsupported session schema '" + m.schema + "'");
  j.at("participant_id").get_to(m.participant_id);
  j.at("condition").get_to(m.condition);
  j.at("seeds").at("protocol").get_to(m.protocol_seed);
  j.at("protocol").get_to(m.protocol);
  j.at("physics").get_to(m.physics);
  j.at("board").get_to(m.board);
  j.at("device").get_to(m.device);
  j.at("traits").get_to(m.traits);
  j.at("day_gap_days").get_to(m.day_gap_days);
  const auto& s = j.at("subject");
  m.subject = s.is_null() ? std::nullopt : std::optional<SubjectSpec>(s.get<SubjectSpec>());
}

}  // namespace springcurl::session_io
