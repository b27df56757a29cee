#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "springcurl/error.hpp"
#include "springcurl/stats/datasets.hpp"
#include "springcurl/stats/formula.hpp"

namespace springcurl::stats {

struct CandidateModel {
  std::string name;
  std::string rhs;  ///< fixed-effect right-hand side
  bool chosen = false;
};

/// A model-selection workflow: one dataset, its responses, and the candidates.
struct ModelFamily {
  std::string name;
  DatasetKind dataset = DatasetKind::Training;
  std::vector<std::string> responses;
  std::vector<CandidateModel> candidates;

  ModelSpec spec(std::size_t index, std::string_view response) const {
    const auto& c = candidates.at(index);
    ModelSpec s = parse_model(std::string(response) + " ~ " + c.rhs + " + (1|ID)", c.name);
    return s;
  }
};

inline ModelFamily training_family() {
  const std::string base = "SpringType*TrialNumber*";
  return {"training",
          DatasetKind::Training,
          {"logAbsForceErr", "logAbsElongErr"},
          {{"Model 1", base + "(FS_c+AC_c+CH_c+BO_c+CU_c+LOC_c)"},
           {"Model 2", base + "(FS_c+CH_c)"},
           {"Model 3", base + "(AC_c+CU_c)"},
           {"Model 4", base + "FS_c", true},
           {"Model 5", base + "AC_c"},
           {"Model 6", base + "CH_c"},
           {"Model 7", base + "BO_c"},
           {"Model 8", base + "CU_c"},
           {"Model 9", base + "LOC_c"}}};
}

inline ModelFamily behavior_family() {
  const std::string base = "SpringType*TrialNumber*";
  return {"behavior",
          DatasetKind::Training,
          {"pathLenMm", "dirChanges"},
          {{"Model 1", base + "FS_c"},
           {"Model 2", base + "CH_c"},
           {"Model 3", base + "BO_c"},
           {"Model 4", base + "(FS_c+CH_c)", true},
           {"Model 5", base + "(FS_c+AC_c)"},
           {"Model 6", base + "(FS_c+BO_c)"},
           {"Model 7", base + "(FS_c+CU_c)"},
           {"Model 8", base + "(FS_c+LOC_c)"}}};
}

inline ModelFamily learning_family() {
  auto rhs = [](const std::string& traits) {
    return traits + "*(Condition*Stage+TrialNumber)+Stage*TrialNumber";
  };
  return {"learning",
          DatasetKind::Learning,
          {"logAbsForceErr", "logForceSd"},
          {{"Model 1", rhs("FS_c")},
           {"Model 2", rhs("CU_c")},
           {"Model 3", rhs("CH_c")},
           {"Model 4", rhs("BO_c")},
           {"Model 5", rhs("AC_c")},
           {"Model 6", rhs("LOC_c")},
           {"Model 7", rhs("(FS_c+CU_c)"), true},
           {"Model 8", rhs("(FS_c+CH_c)")},
           {"Model 9", rhs("(FS_c+BO_c)")},
           {"Model 10", rhs("(FS_c+AC_c)")}}};
}

inline ModelFamily transfer_family() {
  return {"transfer",
          DatasetKind::Transfer,
          {"elongMm"},
          {{"Transfer", "TransTask*Stage*TrialNumber*ShotNumber", true}}};
}

inline ModelFamily model_family(std::string_view name) {
  if (name == "training") return training_family();
  if (name == "behavior") return behavior_family();
  if (name == "learning") return learning_family();
  if (name == "transfer") return transfer_family();
  fail(ErrorCode::InvalidInput, "unknown model family '" + std::string(name) + "'");
}

}  // namespace springcurl::stats
