#pragma once

#include <string>
#include <vector>

#include "covplan/mission.hpp"

namespace covplan {

/// Writes trajectory.csv, coverage.csv, messages.jsonl, and metrics.json to
/// `dir` (deterministic bytes under a fixed seed), plus timing.json with the
/// wall-clock figures that are excluded from the determinism contract.
void write_logs(const MissionState& state, const MissionMetrics& metrics,
                const std::string& scenario_ref, const std::string& dir);

struct LoadedLog {
  std::vector<StepLogRow> trajectory;
  std::vector<int> covered_by;
  std::vector<int> covered_at;
  std::string scenario_ref;
};

LoadedLog read_logs(const std::string& dir);

}  // namespace covplan
