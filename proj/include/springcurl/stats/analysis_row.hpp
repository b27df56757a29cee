#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace springcurl::stats {

/// One observation of an analysis dataset. Trait covariates are centered
/// over the dataset they belong to.
struct AnalysisRow {
  std::string participant_id;
  double value = 0.0;  ///< dependent variable

  std::string spring_type = "LS";
  std::string condition = "LS";
  std::string stage = "BL";
  double trial_number = 0.0;
  double shot_number = 0.0;
  double trans_task = 0.0;

  double fs_c = 0.0;
  double ac_c = 0.0;
  double ch_c = 0.0;
  double bo_c = 0.0;
  double cu_c = 0.0;
  double loc_c = 0.0;

  friend bool operator==(const AnalysisRow&, const AnalysisRow&) = default;
};

inline std::optional<double> numeric_value(const AnalysisRow& r, std::string_view name) {
  if (name == "TrialNumber") return r.trial_number;
  if (name == "ShotNumber") return r.shot_number;
  if (name == "TransTask") return r.trans_task;
  if (name == "FS_c") return r.fs_c;
  if (name == "AC_c") return r.ac_c;
  if (name == "CH_c") return r.ch_c;
  if (name == "BO_c") return r.bo_c;
  if (name == "CU_c") return r.cu_c;
  if (name == "LOC_c") return r.loc_c;
  return std::nullopt;
}

inline std::optional<std::string> level_value(const AnalysisRow& r, std::string_view name) {
  if (name == "SpringType") return r.spring_type;
  if (name == "Condition") return r.condition;
  if (name == "Stage") return r.stage;
  return std::nullopt;
}

}  // namespace springcurl::stats
