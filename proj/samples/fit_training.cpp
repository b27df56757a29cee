// Simulates a small cohort, builds the training dataset and ranks the
// candidate models for the log force error.
#include <cstdio>
#include <map>

#include <springcurl/simulation.hpp>
#include <springcurl/stats/datasets.hpp>
#include <springcurl/stats/models.hpp>
#include <springcurl/stats/report.hpp>

using namespace springcurl;

int main() {
  CohortConfig cfg;
  cfg.participants = 24;  // eight per condition keeps the trait interactions estimable
  cfg.seed = 42;

  std::vector<ShotRecord> records;
  std::map<std::string, TraitProfile> traits;
  for (const auto& m : make_cohort(cfg)) {
    traits[m.participant_id] = m.traits;
    const auto r = simulate_session(m);
    records.insert(records.end(), r.begin(), r.end());
  }

  const auto family = stats::training_family();
  const auto rows = stats::to_analysis_rows(stats::build_dataset(family.dataset, records, traits), "logAbsForceErr");

  std::vector<stats::LmmFit> fits;
  for (std::size_t i = 0; i < family.candidates.size(); ++i) {
    try {
      fits.push_back(stats::fit_lmm(family.spec(i, "logAbsForceErr"), rows));
    } catch (const Error& e) {
      std::printf("skipped %s: %s\n", family.candidates[i].name.c_str(), e.what());
    }
  }
  const auto ranking = stats::compare_models(fits);
  std::printf("%s\n", stats::format_ranking(ranking).c_str());
  for (const auto& f : fits) {
    if (f.spec.name == ranking.front().name) std::printf("%s\n", stats::format_fit(f).c_str());
  }
  return 0;
}
