#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "springcurl/error.hpp"
#include "springcurl/metrics.hpp"
#include "springcurl/shot_record.hpp"
#include "springcurl/stats/analysis_row.hpp"
#include "springcurl/subjects.hpp"

namespace springcurl::stats {

enum class DatasetKind { Training, Learning, Transfer };

inline std::string_view to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::Training: return "training";
    case DatasetKind::Learning: return "learning";
    case DatasetKind::Transfer: return "transfer";
  }
  return "?";
}

inline DatasetKind parse_dataset_kind(std::string_view s) {
  if (s == "training") return DatasetKind::Training;
  if (s == "learning") return DatasetKind::Learning;
  if (s == "transfer") return DatasetKind::Transfer;
  fail(ErrorCode::InvalidInput, "unknown dataset kind '" + std::string(s) + "'");
}

/// One exported shot with every metric any model family may use.
struct MetricRow {
  std::string participant_id;
  std::string condition;
  std::string stage;  ///< BL/STR/LTR, or TR for training shots
  std::string spring_type;
  int trial_number = 0;
  int shot_number = 0;
  int trans_task = 0;
  double abs_force_err = 0.0;
  double signed_force_err = 0.0;
  double abs_elong_err = 0.0;
  double elong_mm = 0.0;
  double force_sd_trial = std::numeric_limits<double>::quiet_NaN();
  double path_len_mm = 0.0;
  int dir_changes = 0;
  double log_abs_force_err = 0.0;
  double log_abs_elong_err = 0.0;
  double log_force_sd = std::numeric_limits<double>::quiet_NaN();
  double fs_c = 0.0;
  double ac_c = 0.0;
  double ch_c = 0.0;
  double bo_c = 0.0;
  double cu_c = 0.0;
  double loc_c = 0.0;
};

inline bool belongs_to(DatasetKind kind, const ShotRecord& r) {
  switch (kind) {
    case DatasetKind::Training: return r.phase == PhaseKind::Training;
    case DatasetKind::Learning:
      return r.phase == PhaseKind::Baseline || r.phase == PhaseKind::ShortRetention ||
             r.phase == PhaseKind::LongRetention;
    case DatasetKind::Transfer: return !stage_label(r.phase).empty();
  }
  return false;
}

/// Subtracts the dataset mean from every trait column.
inline void center_traits(std::vector<MetricRow>& rows) {
  if (rows.empty()) return;
  for (double MetricRow::*field : {&MetricRow::fs_c, &MetricRow::ac_c, &MetricRow::ch_c,
                                   &MetricRow::bo_c, &MetricRow::cu_c, &MetricRow::loc_c}) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r.*field;
    mean /= static_cast<double>(rows.size());
    for (auto& r : rows) r.*field -= mean;
  }
}

/// Builds a dataset from completed shots. Trait covariates are centered over
/// the returned rows; aborted shots are skipped.
inline std::vector<MetricRow> build_dataset(DatasetKind kind, std::span<const ShotRecord> records,
                                            const std::map<std::string, TraitProfile>& traits) {
  std::vector<MetricRow> rows;
  std::size_t i = 0;
  while (i < records.size()) {
    // Trials are contiguous runs sharing participant, phase and trial index.
    std::size_t j = i;
    while (j < records.size() && records[j].participant_id == records[i].participant_id &&
           records[j].phase == records[i].phase && records[j].trial_index == records[i].trial_index) {
      ++j;
    }
    const auto trial = records.subspan(i, j - i);
    const ShotRecord& head = trial.front();
    i = j;
    if (!belongs_to(kind, head)) continue;

    const auto agg = aggregate_trial(trial);
    const auto trait_it = traits.find(head.participant_id);
    require(trait_it != traits.end(), ErrorCode::InvalidInput,
            "no trait profile for participant " + head.participant_id);
    const TraitProfile& tp = trait_it->second;
    for (const auto& s : trial) {
      if (s.aborted) continue;
      MetricRow row;
      row.participant_id = s.participant_id;
      row.condition = std::string(to_string(s.condition));
      row.stage = s.phase == PhaseKind::Training ? "TR" : std::string(stage_label(s.phase));
      row.spring_type = std::string(to_string(s.spring_kind));
      row.trial_number = s.training_trial_number.value_or(s.trial_index);
      row.shot_number = s.shot_number;
      row.trans_task = s.is_transfer ? 1 : 0;
      const auto fe = force_error(s);
      row.abs_force_err = fe.absolute_n;
      row.signed_force_err = fe.signed_n;
      row.abs_elong_err = elongation_error(s);
      row.elong_mm = s.release_elongation_mm;
      if (agg) {
        row.force_sd_trial = agg->force_sd_n;
        row.log_force_sd = log_transform(agg->force_sd_n);
      }
      row.path_len_mm = s.path_length_mm;
      row.dir_changes = s.direction_changes;
      row.log_abs_force_err = log_transform(row.abs_force_err);
      row.log_abs_elong_err = log_transform(row.abs_elong_err);
      row.fs_c = tp.free_spirit;
      row.ac_c = tp.achiever;
      row.ch_c = tp.challenge;
      row.bo_c = tp.boredom;
      row.cu_c = tp.curiosity;
      row.loc_c = tp.locus_of_control;
      rows.push_back(std::move(row));
    }
  }
  center_traits(rows);
  return rows;
}

inline constexpr std::string_view kCsvHeader =
    "ID,Condition,Stage,SpringType,TrialNumber,ShotNumber,TransTask,absForceErr,signedForceErr,"
    "absElongErr,elongMm,forceSdTrial,pathLenMm,dirChanges,logAbsForceErr,logAbsElongErr,"
    "logForceSd,FS_c,AC_c,CH_c,BO_c,CU_c,LOC_c";

namespace detail {

inline std::string fmt6(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  return s == "-0" ? "0" : s;
}

inline double parse_number(const std::string& s) {
  if (s == "NA") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    require(used == s.size(), ErrorCode::InvalidInput, "bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    fail(ErrorCode::InvalidInput, "bad number '" + s + "'");
  }
}

}  // namespace detail

/// CSV with a fixed column order and 6 significant digits.
inline std::string write_csv(std::span<const MetricRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    require(r.participant_id.find_first_of(",\n\"") == std::string::npos, ErrorCode::InvalidInput,
            "participant id may not contain commas, quotes or newlines");
    const std::string fields[] = {
        r.participant_id, r.condition, r.stage, r.spring_type,
        std::to_string(r.trial_number), std::to_string(r.shot_number), std::to_string(r.trans_task),
        detail::fmt6(r.abs_force_err), detail::fmt6(r.signed_force_err), detail::fmt6(r.abs_elong_err),
        detail::fmt6(r.elong_mm), detail::fmt6(r.force_sd_trial), detail::fmt6(r.path_len_mm),
        std::to_string(r.dir_changes), detail::fmt6(r.log_abs_force_err),
        detail::fmt6(r.log_abs_elong_err), detail::fmt6(r.log_force_sd), detail::fmt6(r.fs_c),
        detail::fmt6(r.ac_c), detail::fmt6(r.ch_c), detail::fmt6(r.bo_c), detail::fmt6(r.cu_c),
        detail::fmt6(r.loc_c)};
    bool first = true;
    for (const auto& f : fields) {
      if (!first) out += ',';
      out += f;
      first = false;
    }
    out += '\n';
  }
  return out;
}

/// Parses a CSV produced by write_csv. Traits are re-centered, since 6-digit
/// rounding leaves a small residual mean.
inline std::vector<MetricRow> read_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::InvalidInput, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == kCsvHeader, ErrorCode::SchemaMismatch, "unexpected CSV header");
  std::vector<MetricRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    require(f.size() == 23, ErrorCode::InvalidInput,
            "CSV line " + std::to_string(line_no) + " has " + std::to_string(f.size()) + " fields");
    MetricRow r;
    r.participant_id = f[0];
    r.condition = f[1];
    r.stage = f[2];
    r.spring_type = f[3];
    auto as_int = [&](const std::string& s) { return static_cast<int>(detail::parse_number(s)); };
    r.trial_number = as_int(f[4]);
    r.shot_number = as_int(f[5]);
    r.trans_task = as_int(f[6]);
    r.abs_force_err = detail::parse_number(f[7]);
    r.signed_force_err = detail::parse_number(f[8]);
    r.abs_elong_err = detail::parse_number(f[9]);
    r.elong_mm = detail::parse_number(f[10]);
    r.force_sd_trial = detail::parse_number(f[11]);
    r.path_len_mm = detail::parse_number(f[12]);
    r.dir_changes = as_int(f[13]);
    r.log_abs_force_err = detail::parse_number(f[14]);
    r.log_abs_elong_err = detail::parse_number(f[15]);
    r.log_force_sd = detail::parse_number(f[16]);
    r.fs_c = detail::parse_number(f[17]);
    r.ac_c = detail::parse_number(f[18]);
    r.ch_c = detail::parse_number(f[19]);
    r.bo_c = detail::parse_number(f[20]);
    r.cu_c = detail::parse_number(f[21]);
    r.loc_c = detail::parse_number(f[22]);
    rows.push_back(std::move(r));
  }
  center_traits(rows);
  return rows;
}

inline constexpr std::string_view kResponseNames[] = {
    "absForceErr", "signedForceErr", "absElongErr",    "elongMm",        "forceSdTrial",
    "pathLenMm",   "dirChanges",     "logAbsForceErr", "logAbsElongErr", "logForceSd"};

inline double response_value(const MetricRow& r, std::string_view name) {
  if (name == "absForceErr") return r.abs_force_err;
  if (name == "signedForceErr") return r.signed_force_err;
  if (name == "absElongErr") return r.abs_elong_err;
  if (name == "elongMm") return r.elong_mm;
  if (name == "forceSdTrial") return r.force_sd_trial;
  if (name == "pathLenMm") return r.path_len_mm;
  if (name == "dirChanges") return r.dir_changes;
  if (name == "logAbsForceErr") return r.log_abs_force_err;
  if (name == "logAbsElongErr") return r.log_abs_elong_err;
  if (name == "logForceSd") return r.log_force_sd;
  fail(ErrorCode::ModelSpec, "unknown response '" + std::string(name) + "'");
}

/// Rows for fitting one response; rows whose response is unavailable are
/// dropped and traits are re-centered over what remains.
inline std::vector<AnalysisRow> to_analysis_rows(std::span<const MetricRow> rows,
                                                 std::string_view response) {
  std::vector<AnalysisRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    const double y = response_value(r, response);
    if (!std::isfinite(y)) continue;
    AnalysisRow a;
    a.participant_id = r.participant_id;
    a.value = y;
    a.spring_type = r.spring_type;
    a.condition = r.condition;
    a.stage = r.stage;
    a.trial_number = r.trial_number;
    a.shot_number = r.shot_number;
    a.trans_task = r.trans_task;
    a.fs_c = r.fs_c;
    a.ac_c = r.ac_c;
    a.ch_c = r.ch_c;
    a.bo_c = r.bo_c;
    a.cu_c = r.cu_c;
    a.loc_c = r.loc_c;
    out.push_back(std::move(a));
  }
  if (out.empty()) return out;
  for (double AnalysisRow::*field : {&AnalysisRow::fs_c, &AnalysisRow::ac_c, &AnalysisRow::ch_c,
                                     &AnalysisRow::bo_c, &AnalysisRow::cu_c, &AnalysisRow::loc_c}) {
    double mean = 0.0;
    for (const auto& a : out) mean += a.*field;
    mean /= static_cast<double>(out.size());
    for (auto& a : out) a.*field -= mean;
  }
  return out;
}

}  // namespace springcurl::stats
