#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "rokdim/scenario.hpp"

using namespace rokdim;

namespace {

const char* kFullScenario = R"({
  "system": {"builder": "cyclic", "sizes": [128]},
  "marker": {"n": 4, "d": 0},
  "towers": {"box": 2, "taper": 4, "delta_bump": "0"},
  "crossed": {
    "n": 1, "N": 1, "family": "towers",
    "test_ops": [
      {"name": "unit0", "v": [0], "kind": "unit"},
      {"name": "unit1", "v": [1], "kind": "unit"},
      {"name": "rand1", "v": [1], "kind": "random", "seed": 7}
    ]
  }
})";

std::string tmp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("rokdim_test_" + tag);
  std::filesystem::remove_all(dir);
  return dir.string();
}

} // namespace

TEST_CASE("full pipeline scenario on a cyclic model") {
  Scenario sc = scenario_from_json(kFullScenario);
  RunOutcome out = run_scenario(sc, tmp_dir("full"));
  for (const auto& st : out.stages) {
    CAPTURE(st.name);
    CAPTURE(st.error_message);
    CHECK(st.status == "ok");
  }
  CHECK(out.pass);

  // the stage summaries carry the tower budgets
  for (const auto& st : out.stages) {
    if (st.name == "verify") {
      CHECK(st.summary.at("normalized_eps1") == "0");
      Rat eps3 = parse_rat(st.summary.at("raw_eps3"));
      CHECK(eps3 <= Rat(2, 4));
    }
    if (st.name == "marker") CHECK(st.summary.at("control") == "2");
  }
}

TEST_CASE("reports are byte identical across runs") {
  Scenario sc = scenario_from_json(kFullScenario);
  std::string da = tmp_dir("det_a");
  std::string db = tmp_dir("det_b");
  RunOutcome a = run_scenario(sc, da);
  RunOutcome b = run_scenario(sc, db);
  CHECK(a.report_json == b.report_json);
  // artifacts too
  for (const char* name :
       {"freeness.json", "witness.json", "cover.json", "family_raw.json",
        "family_normalized.json", "tolerance_raw.json", "crossed_report.json",
        "crossed_defects.csv"}) {
    CAPTURE(name);
    CHECK(read_file(da + "/" + name) == read_file(db + "/" + name));
  }
}

TEST_CASE("undersized systems fail the freeness stage and halt") {
  Scenario sc = scenario_from_json(R"({
    "system": {"builder": "cyclic", "sizes": [4]},
    "marker": {"n": 4, "d": 0}
  })");
  RunOutcome out = run_scenario(sc, tmp_dir("small"));
  CHECK_FALSE(out.pass);
  REQUIRE(out.stages.size() >= 2);
  CHECK(out.stages[0].name == "free-check");
  CHECK(out.stages[0].status == "failed");
  CHECK(out.stages[0].error_code == "not_free_at_radius");
  for (std::size_t i = 1; i < out.stages.size(); ++i) CHECK(out.stages[i].status == "skipped");
}

TEST_CASE("stage subset on a rank two system") {
  Scenario sc = scenario_from_json(R"({
    "system": {"builder": "cyclic", "sizes": [32, 32]},
    "marker": {"n": 2, "d": 0}
  })");
  std::string dir = tmp_dir("grid");
  RunOutcome out = run_scenario(sc, dir, {"free-check", "marker", "cover"});
  CHECK(out.pass);
  bool saw_marker = false;
  for (const auto& st : out.stages) {
    if (st.name == "marker") {
      saw_marker = true;
      CHECK(st.summary.at("control") == "4");
    }
    CHECK(st.name != "towers");
    CHECK(st.name != "crossed");
  }
  CHECK(saw_marker);
  std::string bounds = read_file(dir + "/bounds.json");
  CHECK(bounds.find("\"dim_rok_bound\": 3") != std::string::npos);
  CHECK(bounds.find("\"dim_rok_cyc_bound\": 15") != std::string::npos);
  CHECK(bounds.find("\"dim_nuc_bound\": 63") != std::string::npos);
}

TEST_CASE("seedless runs reject seedless random ops") {
  Scenario sc = scenario_from_json(R"({
    "system": {"builder": "cyclic", "sizes": [64]},
    "crossed": {
      "n": 1, "N": 1, "family": "exact",
      "test_ops": [{"name": "r", "v": [0], "kind": "random"}]
    }
  })");
  RunOutcome strict = run_scenario(sc, tmp_dir("seedless"), {"crossed"}, true);
  CHECK_FALSE(strict.pass);
  CHECK(strict.stages.back().error_code == "seedless_violation");
  // without the flag the op falls back to the fixed default seed
  RunOutcome loose = run_scenario(sc, tmp_dir("seeded"), {"crossed"}, false);
  CHECK(loose.pass);
}

TEST_CASE("scenario echo is canonical") {
  Scenario sc = scenario_from_json(kFullScenario);
  std::string canon = scenario_to_json(sc);
  CHECK(scenario_to_json(scenario_from_json(canon)) == canon);
}
