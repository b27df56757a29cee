#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "springcurl/error.hpp"
#include "springcurl/session_io/events.hpp"

namespace springcurl::session_io {

inline std::string serialize_event(const SessionEvent& e) { return to_json_line(e).dump() + '\n'; }

inline std::string serialize_events(std::span<const SessionEvent> events) {
  std::string out;
  for (const auto& e : events) out += serialize_event(e);
  return out;
}

struct LogReadResult {
  std::vector<SessionEvent> events;
  /// Set when the log ends in a partial or unparsable line.
  std::optional<std::string> truncation;

  bool truncated() const { return truncation.has_value(); }
  std::optional<std::uint64_t> last_valid_seq() const {
    if (events.empty()) return std::nullopt;
    return events.back().seq;
  }
};

/// Parses JSONL text. A damaged tail yields the valid prefix plus a truncation
/// note; structurally wrong events and schema mismatches throw.
inline LogReadResult parse_log(std::string_view text) {
  LogReadResult out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const bool complete = nl != std::string_view::npos;
    const std::string_view line = text.substr(pos, complete ? nl - pos : std::string_view::npos);
    pos = complete ? nl + 1 : text.size();
    if (line.empty() && complete) continue;

    json j = json::parse(line.begin(), line.end(), nullptr, false);
    if (!complete || j.is_discarded()) {
      std::ostringstream note;
      note << "log truncated after ";
      if (out.events.empty()) {
        note << "no valid events";
      } else {
        note << "seq " << out.events.back().seq;
      }
      out.truncation = note.str();
      return out;
    }
    SessionEvent e = from_json_line(j);
    const std::uint64_t expected = out.events.empty() ? 0 : out.events.back().seq + 1;
    require(e.seq == expected, ErrorCode::SchemaMismatch,
            "non-contiguous sequence number " + std::to_string(e.seq) + ", expected " +
                std::to_string(expected));
    if (out.events.empty()) {
      require(std::holds_alternative<ev::SessionStarted>(e.body), ErrorCode::SchemaMismatch,
              "log must begin with SessionStarted");
    }
    out.events.push_back(std::move(e));
  }
  return out;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(static_cast<bool>(out), ErrorCode::Io, "write failed for " + path.string());
}

inline LogReadResult read_log(const std::filesystem::path& path) { return parse_log(read_text(path)); }

/// Throws TruncatedLog unless the whole log parsed.
inline std::vector<SessionEvent> require_complete(LogReadResult r) {
  if (r.truncated()) fail(ErrorCode::TruncatedLog, *r.truncation);
  return std::move(r.events);
}

/// Append-only JSONL writer; every event is flushed as its own line.
class LogWriter {
 public:
  explicit LogWriter(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out_), ErrorCode::Io, "cannot write " + path.string());
  }

  void append(const SessionEvent& e) {
    const std::string line = serialize_event(e);
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    require(static_cast<bool>(out_), ErrorCode::Io, "log write failed");
  }

 private:
  std::ofstream out_;
};

/// `<root>/<participant>/` with day1.jsonl, day2.jsonl and manifest.json.
struct SessionPaths {
  std::filesystem::path dir;

  SessionPaths(const std::filesystem::path& root, const std::string& participant_id)
      : dir(root / participant_id) {}

  std::filesystem::path day_log(int day) const { return dir / ("day" + std::to_string(day) + ".jsonl"); }
  std::filesystem::path manifest() const { return dir / "manifest.json"; }
};

/// Event sink that routes each day's events to its own file.
class SessionDirectoryWriter {
 public:
  explicit SessionDirectoryWriter(std::filesystem::path root) : root_(std::move(root)) {}

  void operator()(const SessionEvent& e) {
    if (const auto* s = std::get_if<ev::SessionStarted>(&e.body)) {
      const SessionPaths paths(root_, s->manifest.participant_id);
      if (s->day == 1) write_text(paths.manifest(), json(s->manifest).dump(2) + "\n");
      writer_.emplace(paths.day_log(s->day));
    }
    require(writer_.has_value(), ErrorCode::ProtocolViolation, "event before SessionStarted");
    writer_->append(e);
  }

 private:
  std::filesystem::path root_;
  std::optional<LogWriter> writer_;
};

}  // namespace springcurl::session_io
