#pragma once

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "springcurl/json.hpp"
#include "springcurl/service/server.hpp"
#include "springcurl/session_io/export.hpp"
#include "springcurl/simulation.hpp"
#include "springcurl/stats/models.hpp"
#include "springcurl/stats/report.hpp"
#include "springcurl/traits_csv.hpp"

namespace springcurl::cli {

namespace fs = std::filesystem;

struct Options {
  std::string condition = "LS";
  std::uint64_t seed = 1;
  int participants = 3;
  std::string participant = "P001";
  std::string traits;
  std::string out;
  std::string in;
  std::string kind = "training";
  std::string model = "training";
  std::string static_dir;
  std::string address = "127.0.0.1";
  unsigned short port = 8080;
  bool as_json = false;
};

inline std::map<std::string, TraitProfile> load_traits(const std::string& path) {
  if (path.empty()) return {};
  return parse_traits_csv(session_io::read_text(path));
}

// -- plan ----------------------------------------------------------------------

inline int cmd_plan(const Options& o, std::ostream& out) {
  const auto plan = build_plan(o.participant, parse_condition(o.condition), o.seed, ProtocolConfig{});
  out << json(plan).dump(2) << "\n";
  return 0;
}

// -- simulate ------------------------------------------------------------------

/// Manifests for the cohort with any traits from the CSV applied by ID.
inline std::vector<session_io::SessionManifest> cohort_manifests(const Options& o) {
  CohortConfig cfg;
  cfg.participants = o.participants;
  cfg.seed = o.seed;
  auto manifests = make_cohort(cfg);
  const auto traits = load_traits(o.traits);
  for (auto& m : manifests) {
    if (auto it = traits.find(m.participant_id); it != traits.end()) m.traits = it->second;
  }
  return manifests;
}

inline void write_exports(const fs::path& dir, std::span<const session_io::EventLog> logs) {
  for (auto kind : {stats::DatasetKind::Training, stats::DatasetKind::Learning, stats::DatasetKind::Transfer}) {
    const auto rows = session_io::export_dataset(logs, kind);
    session_io::write_text(dir / (std::string(to_string(kind)) + ".csv"), stats::write_csv(rows));
  }
}

/// Runs the cohort headless, writing `<out>/sessions/<id>/` logs and the
/// three analysis CSVs to `<out>/`.
inline int cmd_simulate(const Options& o, std::ostream& out) {
  require(!o.out.empty(), ErrorCode::InvalidInput, "simulate needs --out");
  const fs::path root(o.out);
  const fs::path sessions = root / "sessions";
  std::vector<session_io::EventLog> logs;
  for (const auto& m : cohort_manifests(o)) {
    session_io::SessionDirectoryWriter writer(sessions);
    session_io::EventLog day1, day2;
    int day = 1;
    simulate_session(m, [&](const session_io::SessionEvent& e) {
      writer(e);
      if (const auto* s = std::get_if<session_io::ev::SessionStarted>(&e.body)) day = s->day;
      (day == 1 ? day1 : day2).push_back(e);
    });
    logs.push_back(std::move(day1));
    logs.push_back(std::move(day2));
    out << m.participant_id << " " << to_string(m.condition) << "\n";
  }
  write_exports(root, logs);
  out << "wrote " << logs.size() << " logs to " << sessions.string() << "\n";
  return 0;
}

// -- replay --------------------------------------------------------------------

inline std::vector<fs::path> log_files(const fs::path& in) {
  std::vector<fs::path> files;
  if (fs::is_regular_file(in)) return {in};
  require(fs::is_directory(in), ErrorCode::Io, "no such path " + in.string());
  for (const auto& e : fs::recursive_directory_iterator(in)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Recomputes every logged outcome; exit code 1 on any mismatch or truncation.
inline int cmd_replay(const Options& o, std::ostream& out) {
  require(!o.in.empty(), ErrorCode::InvalidInput, "replay needs --in");
  int status = 0;
  for (const auto& f : log_files(o.in)) {
    const auto log = session_io::read_log(f);
    const auto r = session_io::replay(log.events);
    bool ok = true;
    out << f.string() << ": " << r.records.size() << " shots, " << r.aggregates.size() << " trials";
    if (log.truncated()) {
      out << ", truncated after seq " << (log.last_valid_seq() ? std::to_string(*log.last_valid_seq()) : "none")
          << " (" << *log.truncation << ")";
      ok = false;
    }
    if (!r.consistent()) {
      out << ", " << r.mismatches.size() << " mismatches";
      ok = false;
    }
    out << (ok ? ", consistent\n" : "\n");
    if (!ok) status = 1;
    for (const auto& m : r.mismatches) {
      out << "  seq " << m.seq << " " << m.what << ": logged " << m.logged << " recomputed " << m.recomputed << "\n";
    }
    for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
  }
  return status;
}

// -- export --------------------------------------------------------------------

inline int cmd_export(const Options& o, std::ostream& out) {
  require(!o.in.empty(), ErrorCode::InvalidInput, "export needs --in");
  const auto logs = session_io::load_session_logs(o.in);
  const auto rows = session_io::export_dataset(logs, stats::parse_dataset_kind(o.kind));
  const std::string csv = stats::write_csv(rows);
  if (o.out.empty()) {
    out << csv;
  } else {
    session_io::write_text(o.out, csv);
  }
  return 0;
}

// -- analyze -------------------------------------------------------------------

struct ResponseAnalysis {
  std::string response;
  std::vector<stats::LmmFit> fits;
  std::vector<std::string> skipped;  ///< "Model k: reason"
  std::vector<stats::ModelRanking> ranking;
  std::optional<std::size_t> chosen;  ///< index into fits
};

/// Fits every candidate of a family to each of its responses.
inline std::vector<ResponseAnalysis> analyze_family(const stats::ModelFamily& family,
                                                    std::span<const stats::MetricRow> rows) {
  std::vector<ResponseAnalysis> out;
  for (const auto& response : family.responses) {
    ResponseAnalysis a;
    a.response = response;
    const auto data = stats::to_analysis_rows(rows, response);
    for (std::size_t i = 0; i < family.candidates.size(); ++i) {
      try {
        a.fits.push_back(stats::fit_lmm(family.spec(i, response), data));
        if (family.candidates[i].chosen) a.chosen = a.fits.size() - 1;
      } catch (const Error& e) {
        a.skipped.push_back(family.candidates[i].name + ": " + e.what());
      }
    }
    if (!a.fits.empty()) a.ranking = stats::compare_models(a.fits);
    out.push_back(std::move(a));
  }
  return out;
}

inline int cmd_analyze(const Options& o, std::ostream& out) {
  require(!o.in.empty(), ErrorCode::InvalidInput, "analyze needs --in");
  const auto family = stats::model_family(o.model);
  const auto rows = stats::read_csv(session_io::read_text(o.in));
  const auto results = analyze_family(family, rows);
  if (o.as_json) {
    json j = json::array();
    for (const auto& a : results) {
      json r = {{"response", a.response}, {"skipped", a.skipped}};
      r["ranking"] = json::array();
      for (const auto& m : a.ranking) {
        r["ranking"].push_back({{"model", m.name},
                                {"k", m.n_params},
                                {"log_lik", m.log_lik},
                                {"aic", m.aic},
                                {"bic", m.bic},
                                {"delta_aic", m.delta_aic},
                                {"delta_bic", m.delta_bic}});
      }
      r["chosen"] = a.chosen ? stats::fit_to_json(a.fits[*a.chosen]) : json(nullptr);
      j.push_back(std::move(r));
    }
    out << j.dump(2) << "\n";
    return 0;
  }
  for (const auto& a : results) {
    out << "== " << family.name << " / " << a.response << " (" << rows.size() << " rows)\n";
    out << stats::format_ranking(a.ranking);
    for (const auto& s : a.skipped) out << "skipped " << s << "\n";
    if (a.chosen) out << "\n" << stats::format_fit(a.fits[*a.chosen]);
    out << "\n";
  }
  return 0;
}

// -- serve ---------------------------------------------------------------------

inline session_io::SessionManifest live_manifest(const Options& o) {
  session_io::SessionManifest m;
  m.participant_id = o.participant;
  m.condition = parse_condition(o.condition);
  m.protocol_seed = o.seed;
  const auto traits = load_traits(o.traits);
  if (auto it = traits.find(o.participant); it != traits.end()) m.traits = it->second;
  return m;
}

inline int cmd_serve(const Options& o, std::ostream& out) {
  service::ServerConfig cfg;
  cfg.address = o.address;
  cfg.port = o.port;
  cfg.data_root = o.out.empty() ? fs::path{} : fs::path(o.out) / "sessions";
  cfg.static_root = o.static_dir;
  service::Server server(cfg, live_manifest(o));
  const auto port = server.start();
  out << "serving " << o.participant << " on http://" << o.address << ":" << port << " (ws: /ws)\n" << std::flush;
  boost::asio::io_context signals_io;
  boost::asio::signal_set signals(signals_io, SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code&, int) { server.stop(); });
  signals_io.run();
  return 0;
}

// -- entry -----------------------------------------------------------------------

/// Parses argv and runs one subcommand. Errors print to `err` and return 2.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Haptic spring-curling force-training experiment toolkit", "springcurl"};
  app.require_subcommand(1);
  Options o;

  auto* plan = app.add_subcommand("plan", "Print the session plan as JSON");
  plan->add_option("--condition", o.condition, "LS, GS or AGS")->check(CLI::IsMember({"LS", "GS", "AGS"}));
  plan->add_option("--seed", o.seed, "Protocol seed");
  plan->add_option("--participant", o.participant, "Participant ID");

  auto* sim = app.add_subcommand("simulate", "Run synthetic two-day sessions headless");
  sim->add_option("--seed", o.seed, "Cohort seed");
  sim->add_option("--participants", o.participants, "Cohort size")->check(CLI::PositiveNumber);
  sim->add_option("--traits", o.traits, "Raw questionnaire CSV (ID,FS,AC,CH,BO,CU,LOC)");
  sim->add_option("--out", o.out, "Output directory")->required();

  auto* rep = app.add_subcommand("replay", "Recompute outcomes from session logs");
  rep->add_option("--in", o.in, "A .jsonl log or a directory of them")->required();

  auto* exp = app.add_subcommand("export", "Build an analysis CSV from session logs");
  exp->add_option("--in", o.in, "Sessions directory")->required();
  exp->add_option("--kind", o.kind, "training, learning or transfer")
      ->check(CLI::IsMember({"training", "learning", "transfer"}));
  exp->add_option("--out", o.out, "CSV path (stdout if omitted)");

  auto* ana = app.add_subcommand("analyze", "Fit and rank a family of mixed models");
  ana->add_option("--in", o.in, "Analysis CSV")->required();
  ana->add_option("--model", o.model, "training, behavior, learning or transfer")
      ->check(CLI::IsMember({"training", "behavior", "learning", "transfer"}));
  ana->add_flag("--json", o.as_json, "Emit JSON instead of tables");

  auto* srv = app.add_subcommand("serve", "Host the live protocol over HTTP and WebSocket");
  srv->add_option("--port", o.port, "TCP port (0 picks one)");
  srv->add_option("--address", o.address, "Bind address");
  srv->add_option("--condition", o.condition, "LS, GS or AGS")->check(CLI::IsMember({"LS", "GS", "AGS"}));
  srv->add_option("--seed", o.seed, "Protocol seed");
  srv->add_option("--participant", o.participant, "Participant ID");
  srv->add_option("--traits", o.traits, "Raw questionnaire CSV");
  srv->add_option("--out", o.out, "Data directory for session logs");
  srv->add_option("--static", o.static_dir, "Directory of client files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*plan) return cmd_plan(o, out);
    if (*sim) return cmd_simulate(o, out);
    if (*rep) return cmd_replay(o, out);
    if (*exp) return cmd_export(o, out);
    if (*ana) return cmd_analyze(o, out);
    if (*srv) return cmd_serve(o, out);
  } catch (const std::exception& e) {
    err << "springcurl: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace springcurl::cli
