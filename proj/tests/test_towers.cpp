#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rokdim/towers.hpp"

using namespace rokdim;

namespace {

Vec v1(std::int64_t a) { return Vec({a}); }

// zone weight of the taper, recomputed from scratch
Rat zone_weight(std::int64_t norm, int box, int taper) {
  std::int64_t ln = static_cast<std::int64_t>(box) * taper;
  if (norm <= 2 * ln) return Rat(1);
  if (norm <= 3 * ln) return Rat(3 * ln - norm, ln);
  return Rat(0);
}

} // namespace

TEST_CASE("cover from a tiling marker") {
  SampledSystem z12 = make_cyclic({12});
  PointSet z = PointSet::of(12, {0, 3, 6, 9});
  RokhlinCover cover = cover_from_marker(z12, z, 3, {v1(0)});
  REQUIRE(cover.colors() == 1);
  REQUIRE(cover.towers[0].size() == 3);
  std::size_t total = 0;
  for (const auto& s : cover.towers[0]) {
    CHECK(s.count() == 4);
    total += s.count();
  }
  CHECK(total == 12);
  CHECK(verify_cover(z12, cover).ok());
}

TEST_CASE("cover verification flags constructed failures") {
  SampledSystem z12 = make_cyclic({12});
  PointSet z = PointSet::of(12, {0, 3, 6, 9});
  RokhlinCover cover = cover_from_marker(z12, z, 3, {v1(0)});

  RokhlinCover broken = cover;
  broken.towers[0][2] = PointSet(12); // delete one level
  CoverReport rep = verify_cover(z12, broken);
  CHECK_FALSE(rep.equivariant);
  CHECK_FALSE(rep.covers);
  CHECK_FALSE(rep.uncovered.empty());

  RokhlinCover aliased = cover;
  aliased.towers[0][1] = aliased.towers[0][0]; // level 1 is no longer the translate
  CoverReport rep2 = verify_cover(z12, aliased);
  CHECK_FALSE(rep2.equivariant);
  CHECK_FALSE(rep2.disjoint);
}

TEST_CASE("tower synthesis: zones and taper values") {
  // side 16 cover on Z/32, box 1, taper 2
  SampledSystem z32 = make_cyclic({32});
  ControlledMarkerWitness w = build_controlled_marker(z32, 16, 0);
  RokhlinCover cover = cover_from_marker(z32, w.marker, w.n, w.translates);
  TowerFamily fam = towers_from_cover(z32, cover, 1, 2, Rat(0));
  CHECK(fam.n == 1);
  CHECK(fam.colors() == cover.colors() * 2);
  CHECK(fam.provenance == TowerFamily::Provenance::Raw);

  // independent recomputation: value at x for color (l, j) is the zone
  // weight of the J-window position whose set contains x - a_j
  Vec offset = j_window_offset(8, 1);
  for (int l = 0; l < cover.colors(); ++l)
    for (unsigned mask = 0; mask < 2; ++mask) {
      std::int64_t aj = mask ? 4 : -4; // half-period block shifts, 4Ln/2 = 4
      const auto& fn = fam.values[static_cast<std::size_t>(l) * 2 + mask][0];
      for (std::uint32_t x = 0; x < 32; ++x) {
        Rat expect(0);
        for (const Vec& jw : enum_box(BoxKind::J, 8, 1)) {
          const PointSet& uw =
              cover.towers[static_cast<std::size_t>(l)][static_cast<std::size_t>((jw - offset).c[0])];
          std::uint32_t shifted = z32.act(v1(-aj), x);
          if (uw.contains(shifted)) expect += zone_weight(jw.norm_inf(), 1, 2);
        }
        CHECK(fn[x] == expect);
      }
    }

  // frozen spot values: position 5 tapers to 1/2, position 3 keeps 1,
  // position 7 is cut off
  const auto& f00 = fam.values[0][0]; // l = 0, block shift -4
  std::uint32_t base = 0;
  for (std::uint32_t x = 0; x < 32; ++x)
    if (cover.towers[0][7].contains(x)) base = x; // J-index 0 lives at B-index 7
  CHECK(f00[z32.act(v1(5 - 4), base)] == Rat(1, 2));
  CHECK(f00[z32.act(v1(3 - 4), base)] == Rat(1));
  CHECK(f00[z32.act(v1(7 - 4), base)] == Rat(0));
}

TEST_CASE("tower synthesis bullets on a cyclic model") {
  SampledSystem z128 = make_cyclic({128});
  ControlledMarkerWitness w = build_controlled_marker(z128, 32, 0);
  RokhlinCover cover = cover_from_marker(z128, w.marker, w.n, w.translates);
  TowerFamily fam = towers_from_cover(z128, cover, 2, 2, Rat(0));
  REQUIRE(fam.n == 2);
  REQUIRE(fam.colors() == cover.colors() * 2);

  ToleranceReport rep = verify_def_relations(z128, fam);
  CHECK(rep.eps2 == Rat(0));
  CHECK(rep.eps3 <= Rat(2, 2));
  CHECK(rep.eps1prime >= Rat(0));

  // per-translate equivariance defect within one box period
  for (const auto& color : fam.values) {
    std::vector<Vec> box = enum_box(BoxKind::B, fam.n, 1);
    for (std::size_t vi = 1; vi < box.size(); ++vi) {
      Perm back = z128.permutation(-box[vi]);
      Rat dev(0);
      for (std::uint32_t p = 0; p < 128; ++p) {
        Rat d = color[0][back[p]] - color[vi][p];
        if (d < Rat(0)) d = -d;
        dev = std::max(dev, d);
      }
      CHECK(dev <= Rat(1, 2)); // 1 / taper
    }
  }

  // each shifted block sums to exactly 1 on the inner zone of its towers
  Vec offset = j_window_offset(16, 1);
  for (int l = 0; l < cover.colors(); ++l)
    for (unsigned mask = 0; mask < 2; ++mask) {
      std::int64_t aj = mask ? 8 : -8; // half of the J_16 window side
      const auto& color = fam.values[static_cast<std::size_t>(l) * 2 + mask];
      for (const Vec& w : enum_box(BoxKind::J, 8, 1)) {
        Vec wj = w + v1(aj);
        const PointSet& uw =
            cover.towers[static_cast<std::size_t>(l)][static_cast<std::size_t>((wj - offset).c[0])];
        for (std::size_t p = uw.first(); p != PointSet::npos; p = uw.next(p)) {
          Rat sum(0);
          for (const auto& fn : color) sum += fn[p];
          CHECK(sum == Rat(1));
        }
      }
    }

  TowerFamily norm = normalize_towers(z128, fam);
  ToleranceReport nrep = verify_def_relations(z128, norm);
  CHECK(nrep.eps1 == Rat(0));
  CHECK(nrep.eps2 == Rat(0));
}

TEST_CASE("tower synthesis rejects bad parameters") {
  SampledSystem z32 = make_cyclic({32});
  ControlledMarkerWitness w = build_controlled_marker(z32, 16, 0);
  RokhlinCover cover = cover_from_marker(z32, w.marker, w.n, w.translates);
  CHECK_THROWS_AS(towers_from_cover(z32, cover, 2, 2, Rat(0)), Error); // side mismatch
  CHECK_THROWS_AS(towers_from_cover(z32, cover, 1, 2, Rat(1, 4)), Error); // bump too fat
}

TEST_CASE("normalization") {
  SampledSystem z4 = make_cyclic({4});
  TowerFamily fam;
  fam.n = 1;
  fam.values = {{std::vector<Rat>(4, Rat(1))}, {std::vector<Rat>(4, Rat(1, 2))}};
  TowerFamily norm = normalize_towers(z4, fam);
  CHECK(norm.values[0][0][0] == Rat(2, 3));
  CHECK(norm.values[1][0][0] == Rat(1, 3));
  CHECK(norm.provenance == TowerFamily::Provenance::Normalized);

  // exact partitions are fixed points
  TowerFamily tiling = exact_tiling_family(make_cyclic({12}), {12}, 3);
  TowerFamily same = normalize_towers(make_cyclic({12}), tiling);
  CHECK(same.values == tiling.values);

  TowerFamily low;
  low.n = 1;
  low.values = {{std::vector<Rat>(4, Rat(1, 2))}};
  CHECK_THROWS_WITH_AS(normalize_towers(z4, low), doctest::Contains("point"), Error);
}

TEST_CASE("relation defects on an exact tiling") {
  SampledSystem z12 = make_cyclic({12});
  TowerFamily fam = exact_tiling_family(z12, {12}, 3);
  ToleranceReport rep = verify_def_relations(z12, fam);
  CHECK(rep.eps1 == Rat(0));
  CHECK(rep.eps1prime == Rat(0));
  CHECK(rep.eps2 == Rat(0));
  CHECK(rep.eps3 == Rat(0));
  CHECK(rep.eps4 == Rat(0));
  CHECK(rep.eps5 == Rat(0));
}

TEST_CASE("indicator family demands an exact periodic tiling") {
  SampledSystem z12 = make_cyclic({12});
  CHECK_THROWS_AS(indicator_family(z12, PointSet::of(12, {0, 1}), 3), Error);

  // tiles but is not invariant under the box period in coordinate 0
  SampledSystem grid = make_cyclic({4, 4});
  PointSet z = PointSet::of(16, {0, 2, 9, 11});
  CHECK_THROWS_WITH_AS(indicator_family(grid, z, 2), doctest::Contains("coordinate"), Error);
}

TEST_CASE("closed form dimension bounds") {
  BoundTable t1 = report_bounds(0, 1);
  CHECK(t1.dim_rok_bound == 1);
  CHECK(t1.dim_rok_cyc_bound == 3);
  CHECK(t1.dim_nuc_bound == 7);

  BoundTable t2 = report_bounds(1, 1);
  CHECK(t2.dim_rok_bound == 3);
  CHECK(t2.dim_rok_cyc_bound == 7);
  CHECK(t2.dim_nuc_bound == 31);

  BoundTable t3 = report_bounds(0, 2);
  CHECK(t3.dim_rok_bound == 3);
  CHECK(t3.dim_rok_cyc_bound == 15);
  CHECK(t3.dim_nuc_bound == 63);

  CHECK_THROWS_AS(report_bounds(-1, 1), Error);
  CHECK_THROWS_AS(report_bounds(0, 0), Error);
}

TEST_CASE("tower count matches the controlled marker bound") {
  struct Case {
    int size, n, d;
  };
  for (const Case& c : {Case{96, 3, 0}, Case{96, 3, 1}, Case{64, 4, 1}}) {
    SampledSystem sys = make_cyclic({c.size});
    ControlledMarkerWitness w = build_controlled_marker(sys, c.n, c.d);
    RokhlinCover cover = cover_from_marker(sys, w.marker, w.n, w.translates);
    CHECK(cover.colors() == (c.d + 1) * 2);
    CHECK(cover.colors() == report_bounds(c.d, 1).dim_rok_bound + 1);
  }
}
