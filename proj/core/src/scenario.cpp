#include "rokdim/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>

#include "json.hpp"

namespace rokdim {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("bad_json", "input is not valid JSON");
  return j;
}

struct SplitMix {
  std::uint64_t state;
  explicit SplitMix(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double unit() { return static_cast<double>(next() >> 11) / 9007199254740992.0 * 2.0 - 1.0; }
};

} // namespace

Scenario scenario_from_json(const std::string& text) {
  json j = parse(text);
  if (!j.contains("system")) throw Error("bad_scenario", "scenario needs a system");
  Scenario sc;
  sc.system = system_spec_from_json(j["system"].dump());
  sc.freeness_radius = j.value("freeness_radius", 0);
  if (j.contains("marker")) {
    sc.marker.n = j["marker"].value("n", 0);
    sc.marker.d = j["marker"].value("d", 0);
    if (sc.marker.n < 1) throw Error("bad_scenario", "marker stage needs n >= 1");
  }
  if (j.contains("towers")) {
    sc.towers.box = j["towers"].value("box", 0);
    sc.towers.taper = j["towers"].value("taper", 0);
    if (j["towers"].contains("delta_bump"))
      sc.towers.delta_bump = parse_rat(j["towers"]["delta_bump"].get<std::string>());
    if (sc.towers.box < 1 || sc.towers.taper < 1)
      throw Error("bad_scenario", "towers stage needs box >= 1 and taper >= 1");
  }
  if (j.contains("crossed")) {
    const json& c = j["crossed"];
    sc.crossed.n = c.value("n", 0);
    sc.crossed.N = c.value("N", 0);
    sc.crossed.delta_floor = c.value("delta_floor", 0.0);
    sc.crossed.family = c.value("family", std::string("exact"));
    if (sc.crossed.n < 1 || sc.crossed.N < 1 || sc.crossed.N > sc.crossed.n)
      throw Error("bad_scenario", "crossed stage needs 1 <= N <= n");
    if (!c.contains("test_ops") || c["test_ops"].empty())
      throw Error("bad_scenario", "crossed stage needs test ops");
    for (const auto& e : c["test_ops"]) {
      ScenarioTestOp op;
      op.name = e.at("name").get<std::string>();
      op.v = Vec(e.at("v").get<std::vector<std::int64_t>>());
      op.kind = e.value("kind", std::string("unit"));
      if (e.contains("seed")) op.seed = e["seed"].get<std::uint64_t>();
      if (e.contains("set")) op.set = e["set"].get<std::vector<std::uint32_t>>();
      sc.crossed.test_ops.push_back(std::move(op));
    }
  }
  return sc;
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["schema"] = "rokdim-scenario/1";
  j["system"] = parse(system_spec_to_json(sc.system));
  if (sc.freeness_radius > 0) j["freeness_radius"] = sc.freeness_radius;
  if (sc.marker.n > 0) j["marker"] = {{"n", sc.marker.n}, {"d", sc.marker.d}};
  if (sc.towers.box > 0)
    j["towers"] = {{"box", sc.towers.box},
                   {"taper", sc.towers.taper},
                   {"delta_bump", rat_str(sc.towers.delta_bump)}};
  if (sc.crossed.n > 0) {
    json ops = json::array();
    for (const auto& op : sc.crossed.test_ops) {
      json e;
      e["name"] = op.name;
      e["v"] = op.v.c;
      e["kind"] = op.kind;
      if (op.seed) e["seed"] = *op.seed;
      if (!op.set.empty()) e["set"] = op.set;
      ops.push_back(std::move(e));
    }
    j["crossed"] = {{"n", sc.crossed.n},
                    {"N", sc.crossed.N},
                    {"delta_floor", sc.crossed.delta_floor},
                    {"family", sc.crossed.family},
                    {"test_ops", std::move(ops)}};
  }
  return j.dump(2) + "\n";
}

namespace {

int derived_freeness_radius(const Scenario& sc, const SampledSystem& sys) {
  int n = sc.marker.n > 0 ? sc.marker.n : 2;
  std::vector<Vec> f = enum_box(BoxKind::B, n, sys.rank());
  CoverWindow cw = make_cover_window(f, separation_vectors(n, sc.marker.d, sys.rank()));
  std::int64_t max_coord = 0;
  for (const Vec& a : cw.m)
    for (const Vec& b : cw.m) max_coord = std::max(max_coord, (a - b).norm_inf());
  return static_cast<int>(max_coord) + 1;
}

std::vector<PipelineTestOp> build_test_ops(const SampledSystem& sys,
                                           const Scenario::CrossedParams& params, bool seedless) {
  std::vector<PipelineTestOp> out;
  for (const auto& op : params.test_ops) {
    PipelineTestOp t;
    t.name = op.name;
    t.v = op.v;
    t.a.assign(sys.size(), Cplx(0, 0));
    if (op.kind == "unit") {
      for (auto& x : t.a) x = Cplx(1, 0);
    } else if (op.kind == "indicator") {
      for (std::uint32_t p : op.set) {
        if (p >= sys.size()) throw Error("bad_scenario", "indicator point out of range");
        t.a[p] = Cplx(1, 0);
      }
    } else if (op.kind == "random") {
      if (!op.seed && seedless)
        throw Error("seedless_violation",
                    "test op '" + op.name + "' has no explicit seed; rejected under --seedless");
      SplitMix rng(op.seed.value_or(0));
      double peak = 0;
      for (auto& x : t.a) {
        x = Cplx(rng.unit(), rng.unit());
        peak = std::max(peak, std::abs(x));
      }
      if (peak > 0)
        for (auto& x : t.a) x /= peak;
    } else {
      throw Error("bad_scenario", "unknown test op kind '" + op.kind + "'");
    }
    out.push_back(std::move(t));
  }
  return out;
}

} // namespace

std::vector<PipelineTestOp> test_ops_from_json(const SampledSystem& sys, const std::string& text,
                                               bool seedless) {
  json j = parse(text);
  if (!j.is_array()) throw Error("bad_parameter", "test op file must hold a JSON array");
  Scenario::CrossedParams params;
  for (const auto& e : j) {
    ScenarioTestOp op;
    op.name = e.at("name").get<std::string>();
    op.v = Vec(e.at("v").get<std::vector<std::int64_t>>());
    op.kind = e.value("kind", std::string("unit"));
    if (e.contains("seed")) op.seed = e["seed"].get<std::uint64_t>();
    if (e.contains("set")) op.set = e["set"].get<std::vector<std::uint32_t>>();
    params.test_ops.push_back(std::move(op));
  }
  return build_test_ops(sys, params, seedless);
}

RunOutcome run_scenario(const Scenario& sc, const std::string& out_dir,
                        const std::vector<std::string>& stage_filter, bool seedless) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto want = [&](const std::string& name) {
    return stage_filter.empty() ||
           std::find(stage_filter.begin(), stage_filter.end(), name) != stage_filter.end();
  };
  auto artifact = [&](const std::string& name, const std::string& content) {
    write_file((fs::path(out_dir) / name).string(), content);
    return name;
  };

  RunOutcome outcome;
  bool halted = false;
  SampledSystem sys = sc.system.build();

  std::optional<ControlledMarkerWitness> witness;
  std::optional<RokhlinCover> cover;
  std::optional<TowerFamily> family_raw, family_norm;

  auto run_stage = [&](const std::string& name, bool enabled, auto&& body) {
    if (!want(name)) return;
    StageResult res;
    res.name = name;
    if (!enabled || halted) {
      res.status = "skipped";
      outcome.stages.push_back(std::move(res));
      return;
    }
    auto t0 = std::chrono::steady_clock::now();
    try {
      body(res);
      res.status = "ok";
    } catch (const Error& e) {
      res.status = "failed";
      res.error_code = e.code();
      res.error_message = e.what();
      halted = true;
    } catch (const std::exception& e) {
      res.status = "failed";
      res.error_code = "internal";
      res.error_message = e.what();
      halted = true;
    }
    auto t1 = std::chrono::steady_clock::now();
    outcome.timings_ms.emplace_back(name,
                                    std::chrono::duration<double, std::milli>(t1 - t0).count());
    outcome.stages.push_back(std::move(res));
  };

  run_stage("free-check", true, [&](StageResult& res) {
    int radius = sc.freeness_radius > 0 ? sc.freeness_radius : derived_freeness_radius(sc, sys);
    FreenessCertificate cert = check_free(sys, radius);
    res.artifacts.push_back(artifact("freeness.json", freeness_to_json(cert)));
    res.summary["radius"] = std::to_string(radius);
    res.summary["violations"] = std::to_string(cert.violations.size());
    if (!cert.free())
      throw Error("not_free_at_radius", "freeness audit found " +
                                            std::to_string(cert.violations.size()) + " violations");
  });

  run_stage("marker", sc.marker.n > 0, [&](StageResult& res) {
    witness = build_controlled_marker(sys, sc.marker.n, sc.marker.d);
    res.artifacts.push_back(artifact("witness.json", controlled_witness_to_json(*witness)));
    MarkerReport rep = verify_controlled_marker(sys, *witness);
    res.artifacts.push_back(artifact("marker_report.json", marker_report_to_json(rep)));
    BoundTable bounds = report_bounds(sc.marker.d, sys.rank());
    res.artifacts.push_back(artifact("bounds.json", bounds_to_json(bounds)));
    res.summary["control"] = std::to_string(witness->control);
    res.summary["marker_size"] = std::to_string(witness->marker.count());
    if (!rep.ok()) throw Error("verification_failed", "controlled marker verification failed");
  });

  run_stage("cover", sc.marker.n > 0, [&](StageResult& res) {
    if (!witness) throw Error("missing_stage", "cover stage needs the marker stage");
    cover = cover_from_marker(sys, witness->marker, witness->n, witness->translates);
    res.artifacts.push_back(artifact("cover.json", cover_to_json(*cover)));
    CoverReport rep = verify_cover(sys, *cover);
    res.artifacts.push_back(artifact("cover_report.json", cover_report_to_json(rep)));
    res.summary["towers"] = std::to_string(cover->colors());
    if (!rep.ok()) throw Error("verification_failed", "cover verification failed");
  });

  run_stage("towers", sc.towers.box > 0, [&](StageResult& res) {
    int side = 8 * sc.towers.box * sc.towers.taper;
    ControlledMarkerWitness w = build_controlled_marker(sys, side, sc.marker.d);
    res.artifacts.push_back(artifact("towers_marker.json", controlled_witness_to_json(w)));
    RokhlinCover big = cover_from_marker(sys, w.marker, w.n, w.translates);
    res.artifacts.push_back(artifact("towers_cover.json", cover_to_json(big)));
    family_raw = towers_from_cover(sys, big, sc.towers.box, sc.towers.taper, sc.towers.delta_bump);
    family_norm = normalize_towers(sys, *family_raw);
    res.artifacts.push_back(artifact("family_raw.json", family_to_json(*family_raw)));
    res.artifacts.push_back(artifact("family_normalized.json", family_to_json(*family_norm)));
    res.artifacts.push_back(artifact("family_raw.csv", family_to_csv(sys, *family_raw)));
    res.artifacts.push_back(artifact("family_normalized.csv", family_to_csv(sys, *family_norm)));
    res.summary["colors"] = std::to_string(family_raw->colors());
    res.summary["box"] = std::to_string(family_raw->n);
  });

  run_stage("verify", sc.towers.box > 0, [&](StageResult& res) {
    if (!family_raw) throw Error("missing_stage", "verify stage needs the towers stage");
    ToleranceReport raw = verify_def_relations(sys, *family_raw);
    ToleranceReport norm = verify_def_relations(sys, *family_norm);
    res.artifacts.push_back(artifact("tolerance_raw.json", tolerance_to_json(raw)));
    res.artifacts.push_back(artifact("tolerance_normalized.json", tolerance_to_json(norm)));
    res.summary["raw_eps3"] = rat_str(raw.eps3);
    res.summary["normalized_eps1"] = rat_str(norm.eps1);
    if (raw.eps2 != Rat(0))
      throw Error("budget_exceeded", "raw towers have overlapping supports, eps2 = " + rat_str(raw.eps2));
    if (raw.eps3 > Rat(2, sc.towers.taper))
      throw Error("budget_exceeded", "raw equivariance defect " + rat_str(raw.eps3) +
                                         " exceeds 2/taper");
    if (raw.eps1prime < Rat(0))
      throw Error("budget_exceeded", "raw tower sum dips below 1 by " + rat_str(-raw.eps1prime));
    if (norm.eps1 != Rat(0))
      throw Error("budget_exceeded", "normalized tower sum is not exactly 1");
  });

  run_stage("crossed", sc.crossed.n > 0, [&](StageResult& res) {
    TowerFamily family;
    if (sc.crossed.family == "towers") {
      if (!family_norm) throw Error("missing_stage", "crossed stage asked for the towers family");
      if (family_norm->n != 2 * sc.crossed.n)
        throw Error("family_mismatch", "towers family side does not match the crossed window");
      family = *family_norm;
    } else if (sc.crossed.family == "exact") {
      if (sc.system.kind != SystemSpec::Kind::Cyclic)
        throw Error("bad_scenario", "exact tiling family needs a cyclic system");
      family = exact_tiling_family(sys, sc.system.sizes, 2 * sc.crossed.n);
    } else {
      throw Error("bad_scenario", "unknown family source '" + sc.crossed.family + "'");
    }
    std::vector<PipelineTestOp> ops = build_test_ops(sys, sc.crossed, seedless);
    PipelineReport rep =
        pipeline_defect(sys, family, sc.crossed.n, sc.crossed.N, ops, sc.crossed.delta_floor);
    res.artifacts.push_back(artifact("crossed_report.json", pipeline_report_to_json(rep)));
    res.artifacts.push_back(artifact("crossed_defects.csv", pipeline_defects_csv(rep)));
    res.summary["eps"] = std::to_string(rep.eps);
    res.summary["delta"] = std::to_string(rep.delta);
    if (!rep.pass) throw Error("budget_exceeded", "crossed-product defect budget exceeded");
  });

  outcome.pass = true;
  for (const auto& st : outcome.stages)
    if (st.status == "failed") outcome.pass = false;

  json j;
  j["schema"] = "rokdim-report/1";
  j["scenario"] = parse(scenario_to_json(sc));
  json stages = json::array();
  for (const auto& st : outcome.stages) {
    json s;
    s["name"] = st.name;
    s["status"] = st.status;
    if (!st.error_code.empty()) s["error"] = {{"code", st.error_code}, {"message", st.error_message}};
    s["artifacts"] = st.artifacts;
    s["summary"] = st.summary;
    stages.push_back(std::move(s));
  }
  j["stages"] = std::move(stages);
  j["pass"] = outcome.pass;
  outcome.report_json = j.dump(2) + "\n";
  write_file((fs::path(out_dir) / "report.json").string(), outcome.report_json);
  return outcome;
}

} // namespace rokdim
