#include "rokdim/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rokdim {

using nlohmann::json;

namespace {

json rat_json(const Rat& r) { return rat_str(r); }

json vec_json(const Vec& v) { return json(v.c); }

Vec vec_from(const json& j) {
  return Vec(j.get<std::vector<std::int64_t>>());
}

json vecs_json(const std::vector<Vec>& vs) {
  json a = json::array();
  for (const Vec& v : vs) a.push_back(vec_json(v));
  return a;
}

std::vector<Vec> vecs_from(const json& j) {
  std::vector<Vec> out;
  for (const auto& e : j) out.push_back(vec_from(e));
  return out;
}

json pointset_json(const PointSet& s) { return json(s.members()); }

PointSet pointset_from(const json& j, std::size_t universe) {
  return PointSet::of(universe, j.get<std::vector<std::uint32_t>>());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("bad_json", "input is not valid JSON");
  return j;
}

} // namespace

SampledSystem SystemSpec::build() const {
  switch (kind) {
    case Kind::Cyclic:
      return make_cyclic(sizes, closure_eps);
    case Kind::Odometer:
      return make_odometer(bits, closure_eps);
    case Kind::Explicit:
      return SampledSystem(points, generators, metric, closure_eps);
  }
  throw Error("bad_parameter", "unknown system kind");
}

SystemSpec system_spec_from_json(const std::string& text) {
  json j = parse(text);
  SystemSpec spec;
  if (j.contains("closure_eps")) spec.closure_eps = parse_rat(j["closure_eps"].get<std::string>());
  if (j.contains("builder")) {
    std::string b = j["builder"].get<std::string>();
    if (b == "cyclic") {
      spec.kind = SystemSpec::Kind::Cyclic;
      spec.sizes = j.at("sizes").get<std::vector<int>>();
    } else if (b == "odometer") {
      spec.kind = SystemSpec::Kind::Odometer;
      spec.bits = j.at("bits").get<int>();
    } else {
      throw Error("bad_parameter", "unknown builder '" + b + "'");
    }
    return spec;
  }
  spec.kind = SystemSpec::Kind::Explicit;
  spec.points = j.at("points").get<std::size_t>();
  spec.generators = j.at("generators").get<std::vector<Perm>>();
  for (const auto& e : j.at("metric")) spec.metric.push_back(parse_rat(e.get<std::string>()));
  return spec;
}

std::string system_spec_to_json(const SystemSpec& spec) {
  json j;
  if (spec.closure_eps != Rat(0)) j["closure_eps"] = rat_json(spec.closure_eps);
  switch (spec.kind) {
    case SystemSpec::Kind::Cyclic:
      j["builder"] = "cyclic";
      j["sizes"] = spec.sizes;
      break;
    case SystemSpec::Kind::Odometer:
      j["builder"] = "odometer";
      j["bits"] = spec.bits;
      break;
    case SystemSpec::Kind::Explicit: {
      j["points"] = spec.points;
      j["generators"] = spec.generators;
      json metric = json::array();
      for (const Rat& r : spec.metric) metric.push_back(rat_json(r));
      j["metric"] = std::move(metric);
      break;
    }
  }
  return dump(j);
}

SystemSpec system_spec_of(const SampledSystem& sys) {
  SystemSpec spec;
  spec.kind = SystemSpec::Kind::Explicit;
  spec.points = sys.size();
  spec.generators = sys.generators();
  spec.metric = sys.metric();
  spec.closure_eps = sys.closure_eps();
  return spec;
}

std::string freeness_to_json(const FreenessCertificate& cert) {
  json j;
  j["schema"] = "rokdim-freeness/1";
  j["radius"] = cert.radius;
  j["free"] = cert.free();
  json v = json::array();
  for (const auto& viol : cert.violations) {
    json e;
    e["g"] = vec_json(viol.g);
    e["fixed_point"] = viol.fixed_point;
    v.push_back(std::move(e));
  }
  j["violations"] = std::move(v);
  return dump(j);
}

std::string marker_witness_to_json(const MarkerWitness& w) {
  json j;
  j["schema"] = "rokdim-marker/1";
  j["marker"] = pointset_json(w.marker);
  j["window_f"] = vecs_json(w.window_f);
  j["cover_window_m"] = vecs_json(w.cover_window_m);
  return dump(j);
}

MarkerWitness marker_witness_from_json(const std::string& text, std::size_t universe) {
  json j = parse(text);
  MarkerWitness w;
  w.marker = pointset_from(j.at("marker"), universe);
  w.window_f = vecs_from(j.at("window_f"));
  w.cover_window_m = vecs_from(j.at("cover_window_m"));
  return w;
}

std::string controlled_witness_to_json(const ControlledMarkerWitness& w) {
  json j;
  j["schema"] = "rokdim-controlled-marker/1";
  j["marker"] = pointset_json(w.marker);
  j["n"] = w.n;
  j["control"] = w.control;
  j["translates"] = vecs_json(w.translates);
  return dump(j);
}

ControlledMarkerWitness controlled_witness_from_json(const std::string& text, std::size_t universe) {
  json j = parse(text);
  ControlledMarkerWitness w;
  w.marker = pointset_from(j.at("marker"), universe);
  w.n = j.at("n").get<int>();
  w.control = j.at("control").get<int>();
  w.translates = vecs_from(j.at("translates"));
  return w;
}

std::string marker_report_to_json(const MarkerReport& rep) {
  json j;
  j["schema"] = "rokdim-marker-report/1";
  j["disjoint"] = rep.disjoint;
  if (rep.collision) {
    json c;
    c["a"] = vec_json(rep.collision->a);
    c["b"] = vec_json(rep.collision->b);
    c["point"] = rep.collision->point;
    j["collision"] = std::move(c);
  }
  j["covers"] = rep.covers;
  j["uncovered"] = rep.uncovered;
  j["action_isometric"] = rep.action_isometric;
  j["ok"] = rep.ok();
  return dump(j);
}

std::string cover_to_json(const RokhlinCover& cover) {
  json j;
  j["schema"] = "rokdim-cover/1";
  j["n"] = cover.n;
  json towers = json::array();
  for (const auto& tower : cover.towers) {
    json t = json::array();
    for (const auto& s : tower) t.push_back(pointset_json(s));
    towers.push_back(std::move(t));
  }
  j["towers"] = std::move(towers);
  return dump(j);
}

RokhlinCover cover_from_json(const std::string& text, std::size_t universe) {
  json j = parse(text);
  RokhlinCover cover;
  cover.n = j.at("n").get<int>();
  for (const auto& t : j.at("towers")) {
    std::vector<PointSet> tower;
    for (const auto& s : t) tower.push_back(pointset_from(s, universe));
    cover.towers.push_back(std::move(tower));
  }
  return cover;
}

std::string cover_report_to_json(const CoverReport& rep) {
  json j;
  j["schema"] = "rokdim-cover-report/1";
  j["equivariant"] = rep.equivariant;
  if (!rep.equivariance_witness.empty()) j["equivariance_witness"] = rep.equivariance_witness;
  j["disjoint"] = rep.disjoint;
  if (!rep.disjoint_witness.empty()) j["disjoint_witness"] = rep.disjoint_witness;
  j["covers"] = rep.covers;
  j["uncovered"] = rep.uncovered;
  j["ok"] = rep.ok();
  return dump(j);
}

std::string family_to_json(const TowerFamily& fam) {
  json j;
  j["schema"] = "rokdim-towers/1";
  j["n"] = fam.n;
  j["provenance"] = fam.provenance == TowerFamily::Provenance::Raw ? "raw" : "normalized";
  json colors = json::array();
  for (const auto& color : fam.values) {
    json fns = json::array();
    for (const auto& fn : color) {
      json vals = json::array();
      for (const Rat& r : fn) vals.push_back(rat_json(r));
      fns.push_back(std::move(vals));
    }
    colors.push_back(std::move(fns));
  }
  j["values"] = std::move(colors);
  return dump(j);
}

TowerFamily family_from_json(const std::string& text) {
  json j = parse(text);
  TowerFamily fam;
  fam.n = j.at("n").get<int>();
  fam.provenance = j.at("provenance").get<std::string>() == "normalized"
                       ? TowerFamily::Provenance::Normalized
                       : TowerFamily::Provenance::Raw;
  for (const auto& color : j.at("values")) {
    std::vector<std::vector<Rat>> fns;
    for (const auto& fn : color) {
      std::vector<Rat> vals;
      for (const auto& e : fn) vals.push_back(parse_rat(e.get<std::string>()));
      fns.push_back(std::move(vals));
    }
    fam.values.push_back(std::move(fns));
  }
  return fam;
}

std::string family_to_csv(const SampledSystem& sys, const TowerFamily& fam) {
  std::ostringstream os;
  std::vector<Vec> box = enum_box(BoxKind::B, fam.n, sys.rank());
  os << "point";
  for (int c = 0; c < fam.colors(); ++c)
    for (const Vec& v : box) os << ",f_c" << c << '_' << vec_str(v);
  os << '\n';
  for (std::uint32_t p = 0; p < sys.size(); ++p) {
    os << p;
    for (const auto& color : fam.values)
      for (const auto& fn : color) os << ',' << to_double(fn[p]);
    os << '\n';
  }
  return os.str();
}

std::string tolerance_to_json(const ToleranceReport& rep) {
  json j;
  j["schema"] = "rokdim-tolerance/1";
  j["eps1"] = {{"exact", rat_str(rep.eps1)}, {"value", rep.eps1_d()}};
  j["eps1prime"] = {{"exact", rat_str(rep.eps1prime)}, {"value", to_double(rep.eps1prime)}};
  j["eps2"] = {{"exact", rat_str(rep.eps2)}, {"value", rep.eps2_d()}};
  j["eps3"] = {{"exact", rat_str(rep.eps3)}, {"value", rep.eps3_d()}};
  j["eps4"] = {{"exact", rat_str(rep.eps4)}, {"value", to_double(rep.eps4)}};
  j["eps5"] = {{"exact", rat_str(rep.eps5)}, {"value", to_double(rep.eps5)}};
  return dump(j);
}

std::string bounds_to_json(const BoundTable& table) {
  json j;
  j["schema"] = "rokdim-bounds/1";
  j["dim_rok_bound"] = table.dim_rok_bound;
  j["dim_rok_cyc_bound"] = table.dim_rok_cyc_bound;
  j["dim_nuc_bound"] = table.dim_nuc_bound;
  return dump(j);
}

namespace {

json step_json(const StepCheck& st) {
  json j;
  j["name"] = st.name;
  j["measured"] = st.measured;
  j["budget"] = st.budget;
  j["gating"] = st.gating;
  j["pass"] = st.pass;
  return j;
}

} // namespace

std::string pipeline_report_to_json(const PipelineReport& rep) {
  json j;
  j["schema"] = "rokdim-crossed-report/1";
  j["n"] = rep.n;
  j["N"] = rep.N;
  j["m"] = rep.m;
  j["d"] = rep.d;
  j["s"] = rep.s;
  j["eps"] = rep.eps;
  j["delta"] = rep.delta;
  j["delta_floor"] = rep.delta_floor;
  j["tower_sum_identity_exact"] = rep.tower_sum_identity_exact;
  json fam = json::array();
  for (const auto& st : rep.family_checks) fam.push_back(step_json(st));
  j["family_checks"] = std::move(fam);
  json ops = json::array();
  for (const auto& po : rep.per_op) {
    json o;
    o["name"] = po.name;
    o["v"] = vec_json(po.v);
    json steps = json::array();
    for (const auto& st : po.steps) steps.push_back(step_json(st));
    o["steps"] = std::move(steps);
    o["total_defect"] = po.total_defect;
    o["budget"] = po.budget;
    o["per_term_budget"] = po.per_term_budget;
    o["pass"] = po.pass;
    ops.push_back(std::move(o));
  }
  j["per_op"] = std::move(ops);
  j["pass"] = rep.pass;
  return dump(j);
}

std::string pipeline_defects_csv(const PipelineReport& rep) {
  std::ostringstream os;
  os << "test_op,v,total_defect,budget,per_term_budget,pass\n";
  for (const auto& po : rep.per_op)
    os << po.name << ',' << vec_str(po.v) << ',' << po.total_defect << ',' << po.budget << ','
       << po.per_term_budget << ',' << (po.pass ? "true" : "false") << '\n';
  return os.str();
}

std::string cotlar_to_json(const CotlarReport& rep) {
  json j;
  j["schema"] = "rokdim-cotlar/1";
  j["premise_ok"] = rep.premise_ok;
  j["max_pair_norm"] = rep.max_pair_norm;
  j["eta"] = rep.eta;
  j["delta"] = rep.delta;
  j["sum_norm"] = rep.sum_norm;
  j["max_norm"] = rep.max_norm;
  j["conclusion_holds"] = rep.conclusion_holds;
  return dump(j);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io_error", "cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io_error", "cannot open '" + path + "' for writing");
  out << content;
}

} // namespace rokdim
