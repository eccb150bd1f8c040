#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rokdim/io.hpp"

namespace rokdim {

struct ScenarioTestOp {
  std::string name;
  Vec v;
  std::string kind = "unit"; // unit | random | indicator
  std::optional<std::uint64_t> seed;
  std::vector<std::uint32_t> set;
};

/// One reproducible pipeline configuration; every algorithmic choice
/// downstream is deterministic, so a scenario pins its outputs byte for
/// byte.
struct Scenario {
  SystemSpec system;
  int freeness_radius = 0; // 0 = derive from the marker window

  struct MarkerParams {
    int n = 0; // 0 disables the stage
    int d = 0;
  } marker;

  struct TowersParams {
    int box = 0; // 0 disables the stage
    int taper = 0;
    Rat delta_bump{0};
  } towers;

  struct CrossedParams {
    int n = 0; // 0 disables the stage
    int N = 0;
    double delta_floor = 0;
    std::string family = "exact"; // exact | towers
    std::vector<ScenarioTestOp> test_ops;
  } crossed;
};

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& sc);

/// Parses a JSON array of test ops ({"name", "v", "kind", "seed", "set"})
/// and realizes their coefficient functions on the system.
std::vector<PipelineTestOp> test_ops_from_json(const SampledSystem& sys, const std::string& text,
                                               bool seedless = false);

struct StageResult {
  std::string name;
  std::string status; // ok | failed | skipped
  std::string error_code;
  std::string error_message;
  std::vector<std::string> artifacts;
  std::map<std::string, std::string> summary;
};

struct RunOutcome {
  bool pass = false;
  std::vector<StageResult> stages;
  std::string report_json;
  std::vector<std::pair<std::string, double>> timings_ms; // console only
};

/// Runs the requested stages in pipeline order (all stages when the list is
/// empty), writes artifacts and report.json under out_dir, and returns the
/// outcome. A stage failure marks downstream stages skipped. The report
/// contains no timing data; re-running a scenario reproduces it exactly.
RunOutcome run_scenario(const Scenario& sc, const std::string& out_dir,
                        const std::vector<std::string>& stages = {}, bool seedless = false);

} // namespace rokdim
