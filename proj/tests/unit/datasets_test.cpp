#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include <springcurl/simulation.hpp>
#include <springcurl/stats/datasets.hpp>

using namespace springcurl;
using namespace springcurl::stats;

namespace {

struct Cohort {
  std::vector<ShotRecord> records;
  std::map<std::string, TraitProfile> traits;
};

const Cohort& cohort() {
  static const Cohort c = [] {
    Cohort out;
    CohortConfig cfg;
    cfg.participants = 3;
    cfg.seed = 21;
    for (const auto& m : make_cohort(cfg)) {
      out.traits[m.participant_id] = m.traits;
      const auto recs = simulate_session(m);
      out.records.insert(out.records.end(), recs.begin(), recs.end());
    }
    return out;
  }();
  return c;
}

std::map<std::string, int> rows_per_participant(const std::vector<MetricRow>& rows) {
  std::map<std::string, int> n;
  for (const auto& r : rows) ++n[r.participant_id];
  return n;
}

}  // namespace

TEST(Datasets, RowCountsPerParticipant) {
  const auto& c = cohort();
  const std::map<DatasetKind, int> expected{
      {DatasetKind::Training, 112}, {DatasetKind::Learning, 36}, {DatasetKind::Transfer, 72}};
  for (const auto& [kind, count] : expected) {
    const auto rows = build_dataset(kind, c.records, c.traits);
    for (const auto& [id, n] : rows_per_participant(rows)) EXPECT_EQ(n, count) << to_string(kind) << " " << id;
    EXPECT_EQ(rows_per_participant(rows).size(), 3u);
  }
}

TEST(Datasets, TraitsCentered) {
  const auto& c = cohort();
  for (auto kind : {DatasetKind::Training, DatasetKind::Learning, DatasetKind::Transfer}) {
    const auto rows = build_dataset(kind, c.records, c.traits);
    for (double MetricRow::*f : {&MetricRow::fs_c, &MetricRow::ac_c, &MetricRow::ch_c, &MetricRow::bo_c,
                                 &MetricRow::cu_c, &MetricRow::loc_c}) {
      double mean = 0.0;
      for (const auto& r : rows) mean += r.*f;
      EXPECT_LT(std::abs(mean / static_cast<double>(rows.size())), 1e-10);
    }
    const auto analysis = to_analysis_rows(rows, "logAbsForceErr");
    double mean = 0.0;
    for (const auto& a : analysis) mean += a.fs_c;
    EXPECT_LT(std::abs(mean / static_cast<double>(analysis.size())), 1e-10);
  }
}

TEST(Datasets, TrainingLabelsCatchTrialsAsLinear) {
  const auto& c = cohort();
  const auto rows = build_dataset(DatasetKind::Training, c.records, c.traits);
  const std::set<int> catches{4, 9, 13, 18, 22, 27};
  for (const auto& r : rows) {
    EXPECT_EQ(r.stage, "TR");
    EXPECT_GE(r.trial_number, 0);
    EXPECT_LE(r.trial_number, 27);
    if (catches.count(r.trial_number)) {
      EXPECT_EQ(r.spring_type, "LS");
    } else {
      EXPECT_EQ(r.spring_type, r.condition);
    }
  }
}

TEST(Datasets, LearningAndTransferShapes) {
  const auto& c = cohort();
  for (const auto& r : build_dataset(DatasetKind::Learning, c.records, c.traits)) {
    EXPECT_TRUE(r.stage == "BL" || r.stage == "STR" || r.stage == "LTR");
    EXPECT_TRUE(r.trial_number == 0 || r.trial_number == 1);
    EXPECT_EQ(r.trans_task, 0);
    EXPECT_TRUE(std::isfinite(r.log_force_sd));
    EXPECT_NEAR(r.log_force_sd, std::log(std::max(r.force_sd_trial, 1e-3)), 1e-12);
  }
  int transfer = 0;
  for (const auto& r : build_dataset(DatasetKind::Transfer, c.records, c.traits)) {
    transfer += r.trans_task;
    EXPECT_NEAR(r.abs_elong_err, std::abs(r.elong_mm - (r.trans_task ? 70.0 : 90.0)), 1e-9);
  }
  EXPECT_EQ(transfer, 3 * 36);
}

TEST(Datasets, MissingTraitsRejected) {
  const auto& c = cohort();
  EXPECT_THROW(build_dataset(DatasetKind::Training, c.records, {}), Error);
}

TEST(Datasets, AbortedShotsSkipped) {
  ShotRecord a;
  a.participant_id = "X";
  a.phase = PhaseKind::Baseline;
  a.release_force_n = 9.0;
  a.release_elongation_mm = 80.0;
  ShotRecord b = a;
  b.aborted = true;
  ShotRecord d = a;
  d.release_force_n = 11.0;
  const std::vector<ShotRecord> recs{a, b, d};
  const auto rows = build_dataset(DatasetKind::Learning, recs, {{"X", TraitProfile{}}});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].force_sd_trial, std::sqrt(2.0), 1e-12);
}

TEST(Csv, RoundTrip) {
  const auto& c = cohort();
  const auto rows = build_dataset(DatasetKind::Learning, c.records, c.traits);
  const auto text = write_csv(rows);
  EXPECT_EQ(text.substr(0, kCsvHeader.size()), kCsvHeader);
  const auto back = read_csv(text);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].participant_id, rows[i].participant_id);
    EXPECT_EQ(back[i].stage, rows[i].stage);
    EXPECT_EQ(back[i].trial_number, rows[i].trial_number);
    EXPECT_EQ(back[i].dir_changes, rows[i].dir_changes);
    EXPECT_NEAR(back[i].elong_mm, rows[i].elong_mm, 1e-5 * std::max(1.0, std::abs(rows[i].elong_mm)));
    EXPECT_NEAR(back[i].fs_c, rows[i].fs_c, 1e-5);
  }
  // Reading re-centers the rounded traits.
  double mean = 0.0;
  for (const auto& r : back) mean += r.fs_c;
  EXPECT_LT(std::abs(mean / static_cast<double>(back.size())), 1e-12);
}

TEST(Csv, RejectsBadInput) {
  EXPECT_THROW(read_csv(""), Error);
  try {
    read_csv("ID,Value\nP1,3\n");
    FAIL() << "expected schema mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaMismatch);
  }
  EXPECT_THROW(read_csv(std::string(kCsvHeader) + "\nP1,LS\n"), Error);
  EXPECT_THROW(response_value(MetricRow{}, "nope"), Error);
}

TEST(Csv, UnavailableResponsesDropped) {
  MetricRow r;
  r.participant_id = "A";
  EXPECT_TRUE(to_analysis_rows(std::vector<MetricRow>{r}, "logForceSd").empty());
  EXPECT_EQ(to_analysis_rows(std::vector<MetricRow>{r}, "elongMm").size(), 1u);
}
