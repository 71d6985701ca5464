#pragma once

#include <string>
#include <vector>

#include "twotime/config.hpp"
#include "twotime/emit.hpp"

namespace twotime {

struct ScenarioInfo {
  std::string name;
  std::string summary;
  std::string oracle;     // declared reference, or "none (exploratory)"
  std::string tolerance;  // acceptance tolerance, human-readable
  bool exploratory = false;
};

const std::vector<ScenarioInfo>& scenario_catalog();
const ScenarioInfo& scenario_info(const std::string& name);

// Runs every replica of the configured scenario through a bounded worker
// pool and folds the results in replica order, so the output is independent
// of scheduling.  Replica results are persisted under
// <output_dir>/replicas/<stage>/ as they complete; replicas whose record
// already matches the config hash are loaded instead of recomputed, which is
// also what resume does.  A runaway replica becomes a note, not an abort.
ResultBundle run_scenario(const RunConfig& cfg);

// Completes an interrupted run: reads the config echo written at run start,
// reuses finished replica records, computes the missing ones, re-aggregates.
// Outputs are byte-identical to an uninterrupted run.
ResultBundle resume_scenario(const std::string& out_dir);

}  // namespace twotime
