#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rokdim/crossed.hpp"
#include "rokdim/markers.hpp"
#include "rokdim/towers.hpp"

namespace rokdim {

/// Structured system description mirroring the JSON system files.
struct SystemSpec {
  enum class Kind { Cyclic, Odometer, Explicit };
  Kind kind = Kind::Cyclic;
  std::vector<int> sizes;     // cyclic
  int bits = 0;               // odometer
  std::size_t points = 0;     // explicit
  std::vector<Perm> generators;
  std::vector<Rat> metric;
  Rat closure_eps{0};

  SampledSystem build() const;
};

SystemSpec system_spec_from_json(const std::string& text);
std::string system_spec_to_json(const SystemSpec& spec);
/// Explicit description of a built system (used when no builder is known).
SystemSpec system_spec_of(const SampledSystem& sys);

std::string freeness_to_json(const FreenessCertificate& cert);

std::string marker_witness_to_json(const MarkerWitness& w);
MarkerWitness marker_witness_from_json(const std::string& text, std::size_t universe);

std::string controlled_witness_to_json(const ControlledMarkerWitness& w);
ControlledMarkerWitness controlled_witness_from_json(const std::string& text, std::size_t universe);

std::string marker_report_to_json(const MarkerReport& rep);

std::string cover_to_json(const RokhlinCover& cover);
RokhlinCover cover_from_json(const std::string& text, std::size_t universe);

std::string cover_report_to_json(const CoverReport& rep);

std::string family_to_json(const TowerFamily& fam);
TowerFamily family_from_json(const std::string& text);

/// Per-function value table, one row per point, one column per (color, v).
std::string family_to_csv(const SampledSystem& sys, const TowerFamily& fam);

std::string tolerance_to_json(const ToleranceReport& rep);
std::string bounds_to_json(const BoundTable& table);
std::string pipeline_report_to_json(const PipelineReport& rep);
std::string pipeline_defects_csv(const PipelineReport& rep);
std::string cotlar_to_json(const CotlarReport& rep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace rokdim
