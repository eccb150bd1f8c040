#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rokdim/markers.hpp"

namespace rokdim {

/// Family of open-set towers: for each color l, the sets U_v = alpha^v(U_0)
/// indexed by v in B_n are pairwise disjoint (closure model) and the whole
/// family covers the sample.
struct RokhlinCover {
  int n = 0;
  /// towers[l][i] for i indexing enum_box(B, n, m).
  std::vector<std::vector<PointSet>> towers;
  int colors() const { return static_cast<int>(towers.size()); }
};

struct CoverReport {
  bool equivariant = false;
  std::string equivariance_witness;
  bool disjoint = false;
  std::string disjoint_witness;
  bool covers = false;
  std::vector<std::uint32_t> uncovered;
  bool ok() const { return equivariant && disjoint && covers; }
};

/// Towers from a verified controlled marker: tower l consists of the
/// translates alpha^(t_l + v)(Z), v in B_n. Invariants are re-verified
/// before returning.
RokhlinCover cover_from_marker(const SampledSystem& sys, const PointSet& z, int n,
                               const std::vector<Vec>& translates);

CoverReport verify_cover(const SampledSystem& sys, const RokhlinCover& cover);

/// Indexed nonnegative functions f_v^(c) on the sample, v in B_n, exact
/// rational values in [0,1].
struct TowerFamily {
  enum class Provenance { Raw, Normalized };
  int n = 0;
  Provenance provenance = Provenance::Raw;
  /// values[c][i][p]: color c, box index i (enum_box order), point p.
  std::vector<std::vector<std::vector<Rat>>> values;

  int colors() const { return static_cast<int>(values.size()); }
  std::size_t box_size() const { return values.empty() ? 0 : values[0].size(); }
};

/// Tower functions synthesized from a large Rokhlin cover. The cover side
/// must be 8 * box_side * taper_n (J-window side 4 * box_side * taper_n).
/// Center bump: 1 on U_0, distance-tapered on the delta_bump fattening.
/// Produces cover.colors() * 2^m upper indices; the equivariance defect of
/// the result is at most 2 / taper_n.
TowerFamily towers_from_cover(const SampledSystem& sys, const RokhlinCover& cover_big,
                              int box_side, int taper_n, const Rat& delta_bump);

/// Indicator family of a single exactly tiling tower: f_v = 1 on
/// alpha^v(Z). Requires the translates alpha^v(Z), v in B_n, to partition
/// the sample and Z to be invariant under n * e_i for every coordinate.
TowerFamily indicator_family(const SampledSystem& sys, const PointSet& z, int n);

/// For a cyclic system whose sizes are all divisible by `side`, the base
/// sublattice {x : x_i = 0 mod side} tiles exactly; returns its indicator
/// family. The canonical exact model with all tolerances zero.
TowerFamily exact_tiling_family(const SampledSystem& sys, const std::vector<int>& sizes, int side);

/// Pointwise division by the total sum S (requires S >= 1 everywhere);
/// the normalized family sums to 1 exactly and keeps all supports.
TowerFamily normalize_towers(const SampledSystem& sys, const TowerFamily& family);

/// Sup-norm defects of the tower relations, exact rationals with float
/// mirrors. eps4/eps5 vanish identically on a function algebra.
struct ToleranceReport {
  Rat eps1{0};       // |1 - sum of all towers|
  Rat eps1prime{0};  // min(sum) - 1, the one-sided margin
  Rat eps2{0};       // largest pairwise product within a color
  Rat eps3{0};       // equivariance defect with cyclic reindexing
  Rat eps4{0};
  Rat eps5{0};
  double eps1_d() const { return to_double(eps1); }
  double eps2_d() const { return to_double(eps2); }
  double eps3_d() const { return to_double(eps3); }
};

ToleranceReport verify_def_relations(const SampledSystem& sys, const TowerFamily& family);

/// Closed-form dimension bounds for free actions with boundary-smallness
/// parameter d and rank m.
struct BoundTable {
  std::int64_t dim_rok_bound = 0;      // 2^m (d+1) - 1
  std::int64_t dim_rok_cyc_bound = 0;  // 2^(2m) (d+1) - 1
  std::int64_t dim_nuc_bound = 0;      // 2^(3m) (d+1)^2 - 1
};
BoundTable report_bounds(int d, int m);

} // namespace rokdim
