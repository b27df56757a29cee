#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "springcurl/json.hpp"
#include "springcurl/session_io/manifest.hpp"

namespace springcurl::session_io {

namespace ev {

struct SessionStarted {
  SessionManifest manifest;
  int day = 1;
  friend bool operator==(const SessionStarted&, const SessionStarted&) = default;
};

struct PhaseEntered {
  PhaseKind phase = PhaseKind::Familiarization;
  friend bool operator==(const PhaseEntered&, const PhaseEntered&) = default;
};

struct TrialStarted {
  std::size_t plan_index = 0;
  TrialSpec trial;
  friend bool operator==(const TrialStarted&, const TrialStarted&) = default;
};

struct FootPrompt {
  int from = 1;
  int to = 1;
  friend bool operator==(const FootPrompt&, const FootPrompt&) = default;
};

struct Grab {
  int shot = 0;
  double anchor_mm = 0.0;
  friend bool operator==(const Grab&, const Grab&) = default;
};

/// Pull-axis positions between grab and release, decimated for storage.
struct TraceChunk {
  int shot = 0;
  int hz = 100;
  std::vector<double> positions_mm;
  friend bool operator==(const TraceChunk&, const TraceChunk&) = default;
};

/// Path metrics are computed at full rate before decimation and logged here.
struct Release {
  int shot = 0;
  double force_n = 0.0;
  double elongation_mm = 0.0;
  double path_length_mm = 0.0;
  int direction_changes = 0;
  std::int64_t steps = 0;
  friend bool operator==(const Release&, const Release&) = default;
};

struct Landed {
  int shot = 0;
  double distance = 0.0;
  friend bool operator==(const Landed&, const Landed&) = default;
};

struct Scored {
  int shot = 0;
  int points = 0;
  int trial_score = 0;
  int total_score = 0;
  friend bool operator==(const Scored&, const Scored&) = default;
};

struct ShotAborted {
  int shot = 0;
  std::string reason;
  friend bool operator==(const ShotAborted&, const ShotAborted&) = default;
};

struct TrialEnded {
  std::size_t plan_index = 0;
  int completed_shots = 0;
  std::optional<double> mean_abs_force_error_n;
  std::optional<double> force_sd_n;
  std::optional<double> mean_abs_elongation_error_mm;
  friend bool operator==(const TrialEnded&, const TrialEnded&) = default;
};

struct SessionEnded {
  int day = 1;
  int total_score = 0;
  friend bool operator==(const SessionEnded&, const SessionEnded&) = default;
};

}  // namespace ev

using EventBody = std::variant<ev::SessionStarted, ev::PhaseEntered, ev::TrialStarted, ev::FootPrompt,
                               ev::Grab, ev::TraceChunk, ev::Release, ev::Landed, ev::Scored,
                               ev::ShotAborted, ev::TrialEnded, ev::SessionEnded>;

struct SessionEvent {
  std::uint64_t seq = 0;
  std::int64_t t_ms = 0;
  EventBody body;
  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

inline std::string_view event_type(const EventBody& b) {
  struct Namer {
    std::string_view operator()(const ev::SessionStarted&) const { return "SessionStarted"; }
    std::string_view operator()(const ev::PhaseEntered&) const { return "PhaseEntered"; }
    std::string_view operator()(const ev::TrialStarted&) const { return "TrialStarted"; }
    std::string_view operator()(const ev::FootPrompt&) const { return "FootPrompt"; }
    std::string_view operator()(const ev::Grab&) const { return "Grab"; }
    std::string_view operator()(const ev::TraceChunk&) const { return "TraceChunk"; }
    std::string_view operator()(const ev::Release&) const { return "Release"; }
    std::string_view operator()(const ev::Landed&) const { return "Landed"; }
    std::string_view operator()(const ev::Scored&) const { return "Scored"; }
    std::string_view operator()(const ev::ShotAborted&) const { return "ShotAborted"; }
    std::string_view operator()(const ev::TrialEnded&) const { return "TrialEnded"; }
    std::string_view operator()(const ev::SessionEnded&) const { return "SessionEnded"; }
  };
  return std::visit(Namer{}, b);
}

namespace detail {

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::optional<double> read_optional(const json& j, const char* key) {
  const auto& v = j.at(key);
  return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
}

}  // namespace detail

inline json to_json_line(const SessionEvent& e) {
  json j = {{"seq", e.seq}, {"t_ms", e.t_ms}, {"type", event_type(e.body)}};
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, ev::SessionStarted>) {
          j["day"] = b.day;
          j["manifest"] = b.manifest;
        } else if constexpr (std::is_same_v<T, ev::PhaseEntered>) {
          j["phase"] = b.phase;
        } else if constexpr (std::is_same_v<T, ev::TrialStarted>) {
          j["plan_index"] = b.plan_index;
          j["trial"] = b.trial;
        } else if constexpr (std::is_same_v<T, ev::FootPrompt>) {
          j["from"] = b.from;
          j["to"] = b.to;
        } else if constexpr (std::is_same_v<T, ev::Grab>) {
          j["shot"] = b.shot;
          j["anchor_mm"] = b.anchor_mm;
        } else if constexpr (std::is_same_v<T, ev::TraceChunk>) {
          j["shot"] = b.shot;
          j["hz"] = b.hz;
          j["positions_mm"] = b.positions_mm;
        } else if constexpr (std::is_same_v<T, ev::Release>) {
          j["shot"] = b.shot;
          j["force_n"] = b.force_n;
          j["elongation_mm"] = b.elongation_mm;
          j["path_length_mm"] = b.path_length_mm;
          j["direction_changes"] = b.direction_changes;
          j["steps"] = b.steps;
        } else if constexpr (std::is_same_v<T, ev::Landed>) {
          j["shot"] = b.shot;
          j["distance"] = b.distance;
        } else if constexpr (std::is_same_v<T, ev::Scored>) {
          j["shot"] = b.shot;
          j["points"] = b.points;
          j["trial_score"] = b.trial_score;
          j["total_score"] = b.total_score;
        } else if constexpr (std::is_same_v<T, ev::ShotAborted>) {
          j["shot"] = b.shot;
          j["reason"] = b.reason;
        } else if constexpr (std::is_same_v<T, ev::TrialEnded>) {
          j["plan_index"] = b.plan_index;
          j["completed_shots"] = b.completed_shots;
          j["mean_abs_force_error_n"] = detail::optional_number(b.mean_abs_force_error_n);
          j["force_sd_n"] = detail::optional_number(b.force_sd_n);
          j["mean_abs_elongation_error_mm"] = detail::optional_number(b.mean_abs_elongation_error_mm);
        } else if constexpr (std::is_same_v<T, ev::SessionEnded>) {
          j["day"] = b.day;
          j["total_score"] = b.total_score;
        }
      },
      e.body);
  return j;
}

inline SessionEvent from_json_line(const json& j) {
  try {
    SessionEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.t_ms = j.at("t_ms").get<std::int64_t>();
    const auto type = j.at("type").get<std::string>();
    if (type == "SessionStarted") {
      e.body = ev::SessionStarted{j.at("manifest").get<SessionManifest>(), j.at("day").get<int>()};
    } else if (type == "PhaseEntered") {
      e.body = ev::PhaseEntered{j.at("phase").get<PhaseKind>()};
    } else if (type == "TrialStarted") {
      e.body = ev::TrialStarted{j.at("plan_index").get<std::size_t>(), j.at("trial").get<TrialSpec>()};
    } else if (type == "FootPrompt") {
      e.body = ev::FootPrompt{j.at("from").get<int>(), j.at("to").get<int>()};
    } else if (type == "Grab") {
      e.body = ev::Grab{j.at("shot").get<int>(), j.at("anchor_mm").get<double>()};
    } else if (type == "TraceChunk") {
      e.body = ev::TraceChunk{j.at("shot").get<int>(), j.at("hz").get<int>(),
                              j.at("positions_mm").get<std::vector<double>>()};
    } else if (type == "Release") {
      e.body = ev::Release{j.at("shot").get<int>(),
                           j.at("force_n").get<double>(),
                           j.at("elongation_mm").get<double>(),
                           j.at("path_length_mm").get<double>(),
                           j.at("direction_changes").get<int>(),
                           j.at("steps").get<std::int64_t>()};
    } else if (type == "Landed") {
      e.body = ev::Landed{j.at("shot").get<int>(), j.at("distance").get<double>()};
    } else if (type == "Scored") {
      e.body = ev::Scored{j.at("shot").get<int>(), j.at("points").get<int>(),
                          j.at("trial_score").get<int>(), j.at("total_score").get<int>()};
    } else if (type == "ShotAborted") {
      e.body = ev::ShotAborted{j.at("shot").get<int>(), j.at("reason").get<std::string>()};
    } else if (type == "TrialEnded") {
      e.body = ev::TrialEnded{j.at("plan_index").get<std::size_t>(),
                              j.at("completed_shots").get<int>(),
                              detail::read_optional(j, "mean_abs_force_error_n"),
                              detail::read_optional(j, "force_sd_n"),
                              detail::read_optional(j, "mean_abs_elongation_error_mm")};
    } else if (type == "SessionEnded") {
      e.body = ev::SessionEnded{j.at("day").get<int>(), j.at("total_score").get<int>()};
    } else {
      fail(ErrorCode::SchemaMismatch, "unknown event type '" + type + "'");
    }
    return e;
  } catch (const json::exception& ex) {
    fail(ErrorCode::SchemaMismatch, std::string("malformed event: ") + ex.what());
  }
}

}  // namespace springcurl::session_io
