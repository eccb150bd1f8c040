// Command line front end: builds sampled systems, audits freeness, runs the
// marker / cover / tower constructions, and evaluates the crossed-product
// approximation pipeline. All outputs are deterministic JSON/CSV artifacts.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "rokdim/scenario.hpp"

using namespace rokdim;

namespace {

SampledSystem load_system(const std::string& path, SystemSpec* spec_out = nullptr) {
  SystemSpec spec = system_spec_from_json(read_file(path));
  if (spec_out) *spec_out = spec;
  return spec.build();
}

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

int run_cmd(const std::string& scenario_path, const std::string& out_dir,
            const std::vector<std::string>& stages, bool seedless) {
  Scenario sc = scenario_from_json(read_file(scenario_path));
  RunOutcome out = run_scenario(sc, out_dir, stages, seedless);
  for (const auto& st : out.stages)
    std::cerr << "stage " << st.name << ": " << st.status
              << (st.error_code.empty() ? "" : " (" + st.error_code + ")") << "\n";
  for (const auto& [name, ms] : out.timings_ms)
    std::cerr << "  " << name << ": " << ms << " ms\n";
  std::cerr << (out.pass ? "PASS" : "FAIL") << ", report in " << out_dir << "/report.json\n";
  return out.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"markers, towers and crossed-product approximation checks for sampled group actions"};
  app.require_subcommand(1);

  std::string system_path, scenario_path, witness_path, cover_path, family_path;
  std::string out_dir = ".";
  std::vector<std::string> stages;
  bool seedless = false;
  int radius = 0, n = 2, d = 0, box = 1, taper = 2, big_n = 1, band_n = 1;
  std::string delta_bump = "0";
  double delta_floor = 0;

  auto* free_cmd = app.add_subcommand("free-check", "audit freeness over a J window");
  free_cmd->add_option("--system", system_path, "system file")->required();
  free_cmd->add_option("--radius", radius, "audit radius")->required();
  free_cmd->add_option("--out", out_dir, "output directory");

  auto* marker_cmd = app.add_subcommand("marker", "build and verify a controlled marker");
  marker_cmd->add_option("--system", system_path)->required();
  marker_cmd->add_option("--n", n, "box side");
  marker_cmd->add_option("--d", d, "separation depth");
  marker_cmd->add_option("--out", out_dir);

  auto* cover_cmd = app.add_subcommand("cover", "towers from a controlled marker witness");
  cover_cmd->add_option("--system", system_path)->required();
  cover_cmd->add_option("--witness", witness_path)->required();
  cover_cmd->add_option("--out", out_dir);

  auto* towers_cmd = app.add_subcommand("towers", "synthesize tower functions");
  towers_cmd->add_option("--system", system_path)->required();
  towers_cmd->add_option("--box", box, "tower box side");
  towers_cmd->add_option("--taper", taper, "taper fineness");
  towers_cmd->add_option("--d", d, "separation depth");
  towers_cmd->add_option("--delta-bump", delta_bump, "bump fattening radius (rational)");
  towers_cmd->add_option("--out", out_dir);

  auto* verify_cmd = app.add_subcommand("verify", "tolerance report for a tower family");
  verify_cmd->add_option("--system", system_path)->required();
  verify_cmd->add_option("--family", family_path)->required();
  verify_cmd->add_option("--out", out_dir);

  std::string testops_path;
  auto* crossed_cmd = app.add_subcommand("crossed", "crossed-product approximation defects");
  crossed_cmd->add_option("--system", system_path)->required();
  crossed_cmd->add_option("--family", family_path)->required();
  crossed_cmd->add_option("--n", big_n, "compression window parameter")->required();
  crossed_cmd->add_option("--N", band_n, "test band width")->required();
  crossed_cmd->add_option("--test-ops", testops_path,
                          "JSON test op list (default: units over the band window)");
  crossed_cmd->add_option("--delta-floor", delta_floor, "tolerance floor");
  crossed_cmd->add_option("--out", out_dir);

  auto* run = app.add_subcommand("run", "run a scenario file end to end");
  run->add_option("--scenario", scenario_path)->required();
  run->add_option("--out", out_dir);
  run->add_option("--stages", stages, "subset of stages to run")->delimiter(',');
  run->add_flag("--seedless", seedless, "reject any nondeterministic fallback");

  CLI11_PARSE(app, argc, argv);

  try {
    if (free_cmd->parsed()) {
      FreenessCertificate cert = check_free(load_system(system_path), radius);
      write_file(out_path(out_dir, "freeness.json"), freeness_to_json(cert));
      std::cerr << (cert.free() ? "free" : "violations found") << "\n";
      return cert.free() ? 0 : 1;
    }
    if (marker_cmd->parsed()) {
      SampledSystem sys = load_system(system_path);
      ControlledMarkerWitness w = build_controlled_marker(sys, n, d);
      write_file(out_path(out_dir, "witness.json"), controlled_witness_to_json(w));
      MarkerReport rep = verify_controlled_marker(sys, w);
      write_file(out_path(out_dir, "marker_report.json"), marker_report_to_json(rep));
      write_file(out_path(out_dir, "bounds.json"), bounds_to_json(report_bounds(d, sys.rank())));
      return rep.ok() ? 0 : 1;
    }
    if (cover_cmd->parsed()) {
      SampledSystem sys = load_system(system_path);
      ControlledMarkerWitness w = controlled_witness_from_json(read_file(witness_path), sys.size());
      RokhlinCover cover = cover_from_marker(sys, w.marker, w.n, w.translates);
      write_file(out_path(out_dir, "cover.json"), cover_to_json(cover));
      write_file(out_path(out_dir, "cover_report.json"),
                 cover_report_to_json(verify_cover(sys, cover)));
      return 0;
    }
    if (towers_cmd->parsed()) {
      SampledSystem sys = load_system(system_path);
      ControlledMarkerWitness w = build_controlled_marker(sys, 8 * box * taper, d);
      RokhlinCover cover = cover_from_marker(sys, w.marker, w.n, w.translates);
      TowerFamily raw = towers_from_cover(sys, cover, box, taper, parse_rat(delta_bump));
      TowerFamily norm = normalize_towers(sys, raw);
      write_file(out_path(out_dir, "family_raw.json"), family_to_json(raw));
      write_file(out_path(out_dir, "family_normalized.json"), family_to_json(norm));
      write_file(out_path(out_dir, "family_raw.csv"), family_to_csv(sys, raw));
      write_file(out_path(out_dir, "family_normalized.csv"), family_to_csv(sys, norm));
      write_file(out_path(out_dir, "tolerance_raw.json"),
                 tolerance_to_json(verify_def_relations(sys, raw)));
      write_file(out_path(out_dir, "tolerance_normalized.json"),
                 tolerance_to_json(verify_def_relations(sys, norm)));
      return 0;
    }
    if (verify_cmd->parsed()) {
      SampledSystem sys = load_system(system_path);
      TowerFamily fam = family_from_json(read_file(family_path));
      ToleranceReport rep = verify_def_relations(sys, fam);
      write_file(out_path(out_dir, "tolerance.json"), tolerance_to_json(rep));
      write_file(out_path(out_dir, "family.csv"), family_to_csv(sys, fam));
      return 0;
    }
    if (crossed_cmd->parsed()) {
      SampledSystem sys = load_system(system_path);
      TowerFamily fam = family_from_json(read_file(family_path));
      std::vector<PipelineTestOp> ops;
      if (!testops_path.empty()) {
        ops = test_ops_from_json(sys, read_file(testops_path));
      } else {
        for (const Vec& v : enum_box(BoxKind::J, band_n, sys.rank()))
          ops.push_back({"unit_" + vec_str(v), v, CoefFn(sys.size(), Cplx(1, 0))});
      }
      PipelineReport rep = pipeline_defect(sys, fam, big_n, band_n, ops, delta_floor);
      write_file(out_path(out_dir, "crossed_report.json"), pipeline_report_to_json(rep));
      write_file(out_path(out_dir, "crossed_defects.csv"), pipeline_defects_csv(rep));
      std::cerr << (rep.pass ? "within budget" : "budget exceeded") << "\n";
      return rep.pass ? 0 : 1;
    }
    if (run->parsed()) return run_cmd(scenario_path, out_dir, stages, seedless);
  } catch (const Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
