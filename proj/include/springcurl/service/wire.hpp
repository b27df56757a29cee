#pragma once

#include <optional>
#include <string>
#include <variant>

#include "springcurl/json.hpp"
#include "springcurl/protocol.hpp"

namespace springcurl::service {

inline constexpr int kWireVersion = 1;

enum class Role { Participant, Experimenter };

// Client to server.
namespace msg {

struct Move {
  double x_mm = 0.0;  ///< absolute pull-axis position requested by the pointer
};
struct ButtonDown {};
struct ButtonUp {};
struct Advance {};
struct Pause {};
struct Resume {};
struct AssignCondition {
  GroupCondition condition = GroupCondition::Linear;
};

}  // namespace msg

using ClientMessage = std::variant<msg::Move, msg::ButtonDown, msg::ButtonUp, msg::Advance, msg::Pause,
                                   msg::Resume, msg::AssignCondition>;

inline bool is_experimenter_command(const ClientMessage& m) {
  return std::holds_alternative<msg::Advance>(m) || std::holds_alternative<msg::Pause>(m) ||
         std::holds_alternative<msg::Resume>(m) || std::holds_alternative<msg::AssignCondition>(m);
}

/// Parses one client frame; malformed frames raise InvalidInput.
inline ClientMessage parse_client_message(std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  require(!j.is_discarded() && j.is_object(), ErrorCode::InvalidInput, "message is not a JSON object");
  require(j.value("v", 0) == kWireVersion, ErrorCode::SchemaMismatch, "unsupported wire version");
  const std::string type = j.value("type", "");
  if (type == "move") {
    require(j.contains("x") && j["x"].is_number(), ErrorCode::InvalidInput, "move needs a numeric x");
    const double x = j["x"].get<double>();
    require(std::isfinite(x), ErrorCode::InvalidInput, "move x must be finite");
    return msg::Move{x};
  }
  if (type == "button_down") return msg::ButtonDown{};
  if (type == "button_up") return msg::ButtonUp{};
  if (type == "command") {
    const std::string cmd = j.value("command", "");
    if (cmd == "advance") return msg::Advance{};
    if (cmd == "pause") return msg::Pause{};
    if (cmd == "resume") return msg::Resume{};
    if (cmd == "assign_condition") {
      return msg::AssignCondition{parse_condition(j.value("condition", ""))};
    }
    fail(ErrorCode::InvalidInput, "unknown command '" + cmd + "'");
  }
  fail(ErrorCode::InvalidInput, "unknown message type '" + type + "'");
}

inline json envelope(const char* type) { return {{"v", kWireVersion}, {"type", type}}; }

inline json error_message(const std::string& reason) {
  json j = envelope("error");
  j["reason"] = reason;
  return j;
}

inline json prompt_message(const ProtocolItem& item) {
  json j = envelope("prompt");
  if (const auto* f = std::get_if<FootPrompt>(&item)) {
    j["kind"] = "foot";
    j["from"] = f->from;
    j["to"] = f->to;
  } else if (const auto* p = std::get_if<PhasePrompt>(&item)) {
    j["kind"] = "phase";
    j["prompt"] = std::string(to_string(p->kind));
    j["phase"] = p->phase;
    j["mandatory"] = p->mandatory;
  }
  return j;
}

}  // namespace springcurl::service
