// Runs one synthetic participant through both days and prints per-phase scores.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include <springcurl/simulation.hpp>

using namespace springcurl;

int main(int argc, char** argv) {
  CohortConfig cfg;
  cfg.participants = 1;
  cfg.seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  const auto manifest = make_cohort(cfg).front();

  struct Tally {
    int shots = 0;
    int points = 0;
    double abs_force_err = 0.0;
  };
  std::map<std::string, Tally> by_phase;
  for (const auto& r : simulate_session(manifest)) {
    if (r.aborted) continue;
    auto& t = by_phase[std::string(to_string(r.phase))];
    ++t.shots;
    t.points += r.score;
    t.abs_force_err += std::abs(r.release_force_n - r.target_force_n);
  }

  std::printf("%s (%s)\n", manifest.participant_id.c_str(), std::string(to_string(manifest.condition)).c_str());
  for (const auto& [phase, t] : by_phase) {
    std::printf("  %-24s %4d shots  %5d pts  mean |F err| %.3f N\n", phase.c_str(), t.shots, t.points,
                t.abs_force_err / t.shots);
  }
  return 0;
}
