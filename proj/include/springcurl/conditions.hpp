#pragma once

#include <array>
#include <string>
#include <string_view>

#include "springcurl/error.hpp"
#include "springcurl/springs.hpp"

namespace springcurl {

/// Training group; fixed per participant.
enum class GroupCondition { Linear, Gaussian, AntisymGaussian };

inline std::string_view to_string(GroupCondition c) {
  switch (c) {
    case GroupCondition::Linear: return "LS";
    case GroupCondition::Gaussian: return "GS";
    case GroupCondition::AntisymGaussian: return "AGS";
  }
  return "?";
}

inline GroupCondition parse_condition(std::string_view name) {
  if (name == "LS") return GroupCondition::Linear;
  if (name == "GS") return GroupCondition::Gaussian;
  if (name == "AGS") return GroupCondition::AntisymGaussian;
  fail(ErrorCode::InvalidInput, "unknown condition '" + std::string(name) + "'");
}

inline SpringKind training_spring_kind(GroupCondition c) {
  switch (c) {
    case GroupCondition::Linear: return SpringKind::Linear;
    case GroupCondition::Gaussian: return SpringKind::Gaussian;
    case GroupCondition::AntisymGaussian: return SpringKind::AntisymGaussian;
  }
  return SpringKind::Linear;
}

inline constexpr std::array<GroupCondition, 3> kAllConditions{
    GroupCondition::Linear, GroupCondition::Gaussian, GroupCondition::AntisymGaussian};

/// Protocol phases in execution order. Long* phases run on day 2.
enum class PhaseKind {
  Familiarization,
  Baseline,
  BaselineTransfer,
  Training,
  Washout,
  ShortRetention,
  ShortRetentionTransfer,
  LongRetention,
  LongRetentionTransfer,
};

inline constexpr std::array<PhaseKind, 9> kPhaseOrder{
    PhaseKind::Familiarization,       PhaseKind::Baseline,      PhaseKind::BaselineTransfer,
    PhaseKind::Training,              PhaseKind::Washout,       PhaseKind::ShortRetention,
    PhaseKind::ShortRetentionTransfer, PhaseKind::LongRetention, PhaseKind::LongRetentionTransfer};

inline std::string_view to_string(PhaseKind p) {
  switch (p) {
    case PhaseKind::Familiarization: return "Familiarization";
    case PhaseKind::Baseline: return "Baseline";
    case PhaseKind::BaselineTransfer: return "BaselineTransfer";
    case PhaseKind::Training: return "Training";
    case PhaseKind::Washout: return "Washout";
    case PhaseKind::ShortRetention: return "ShortRetention";
    case PhaseKind::ShortRetentionTransfer: return "ShortRetentionTransfer";
    case PhaseKind::LongRetention: return "LongRetention";
    case PhaseKind::LongRetentionTransfer: return "LongRetentionTransfer";
  }
  return "?";
}

inline PhaseKind parse_phase(std::string_view name) {
  for (PhaseKind p : kPhaseOrder) {
    if (to_string(p) == name) return p;
  }
  fail(ErrorCode::InvalidInput, "unknown phase '" + std::string(name) + "'");
}

inline bool is_transfer_phase(PhaseKind p) {
  return p == PhaseKind::BaselineTransfer || p == PhaseKind::ShortRetentionTransfer ||
         p == PhaseKind::LongRetentionTransfer;
}

inline int phase_day(PhaseKind p) {
  return (p == PhaseKind::LongRetention || p == PhaseKind::LongRetentionTransfer) ? 2 : 1;
}

/// Analysis stage label (BL/STR/LTR) for baseline and retention phases, empty otherwise.
inline std::string_view stage_label(PhaseKind p) {
  switch (p) {
    case PhaseKind::Baseline:
    case PhaseKind::BaselineTransfer: return "BL";
    case PhaseKind::ShortRetention:
    case PhaseKind::ShortRetentionTransfer: return "STR";
    case PhaseKind::LongRetention:
    case PhaseKind::LongRetentionTransfer: return "LTR";
    default: return "";
  }
}

}  // namespace springcurl
