#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "springcurl/session_io/log.hpp"
#include "springcurl/session_io/replay.hpp"
#include "springcurl/stats/datasets.hpp"

namespace springcurl::session_io {

using EventLog = std::vector<SessionEvent>;

inline const SessionManifest& log_manifest(const EventLog& log) {
  require(!log.empty(), ErrorCode::SchemaMismatch, "empty log");
  const auto* s = std::get_if<ev::SessionStarted>(&log.front().body);
  require(s != nullptr, ErrorCode::SchemaMismatch, "log must begin with SessionStarted");
  return s->manifest;
}

/// All complete day logs under `root`, ordered by participant then day.
inline std::vector<EventLog> load_session_logs(const std::filesystem::path& root) {
  require(std::filesystem::is_directory(root), ErrorCode::Io, "no session directory " + root.string());
  std::vector<std::filesystem::path> files;
  for (const auto& dir : std::filesystem::directory_iterator(root)) {
    if (!dir.is_directory()) continue;
    for (const auto& f : std::filesystem::directory_iterator(dir.path())) {
      if (f.path().extension() == ".jsonl") files.push_back(f.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<EventLog> logs;
  for (const auto& f : files) {
    auto result = read_log(f);
    if (result.truncated()) fail(ErrorCode::TruncatedLog, f.string() + ": " + *result.truncation);
    if (!result.events.empty()) logs.push_back(std::move(result.events));
  }
  return logs;
}

/// Replays every log and builds one analysis dataset across them.
inline std::vector<stats::MetricRow> export_dataset(std::span<const EventLog> logs, stats::DatasetKind kind) {
  std::vector<ShotRecord> records;
  std::map<std::string, TraitProfile> traits;
  std::string schema;
  for (const auto& log : logs) {
    if (log.empty()) continue;
    const auto& m = log_manifest(log);
    if (schema.empty()) schema = m.schema;
    require(m.schema == schema, ErrorCode::SchemaMismatch, "logs mix schema versions");
    traits[m.participant_id] = m.traits;
    const auto replayed = replay(log);
    records.insert(records.end(), replayed.records.begin(), replayed.records.end());
  }
  return stats::build_dataset(kind, records, traits);
}

}  // namespace springcurl::session_io
