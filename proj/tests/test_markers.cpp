#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rokdim/markers.hpp"

using namespace rokdim;

namespace {

Vec v1(std::int64_t a) { return Vec({a}); }

std::vector<Vec> window1(std::initializer_list<std::int64_t> xs) {
  std::vector<Vec> w;
  for (auto x : xs) w.push_back(v1(x));
  return w;
}

// Naive re-verification through single-point action calls only.
bool naive_controlled_check(const SampledSystem& sys, const ControlledMarkerWitness& w) {
  std::vector<bool> covered(sys.size(), false);
  auto box = enum_box(BoxKind::B, w.n, sys.rank());
  for (const Vec& t : w.translates)
    for (const Vec& v : box)
      for (std::uint32_t p = 0; p < sys.size(); ++p)
        if (w.marker.contains(p)) covered[sys.act(t + v, p)] = true;
  for (bool c : covered)
    if (!c) return false;
  for (std::size_t i = 0; i < box.size(); ++i)
    for (std::size_t j = i + 1; j < box.size(); ++j)
      for (std::uint32_t p = 0; p < sys.size(); ++p)
        if (w.marker.contains(p))
          for (std::uint32_t q = 0; q < sys.size(); ++q)
            if (w.marker.contains(q) && sys.act(box[i], p) == sys.act(box[j], q)) return false;
  return true;
}

} // namespace

TEST_CASE("marker verification") {
  SampledSystem z12 = make_cyclic({12});
  PointSet z = PointSet::of(12, {0, 3, 6, 9});
  auto f = enum_box(BoxKind::B, 3, 1);
  auto m = enum_box(BoxKind::J, 2, 1);

  MarkerReport good = verify_marker(z12, z, f, m);
  CHECK(good.ok());
  CHECK(good.action_isometric);

  MarkerReport empty = verify_marker(z12, PointSet(12), f, m);
  CHECK(empty.disjoint);
  CHECK_FALSE(empty.covers);
  CHECK(empty.uncovered.size() == 12);

  MarkerReport bad = verify_marker(z12, PointSet::of(12, {0, 1}), enum_box(BoxKind::B, 2, 1), m);
  CHECK_FALSE(bad.disjoint);
  REQUIRE(bad.collision.has_value());
  CHECK(bad.collision->point == 1);
}

TEST_CASE("controlled marker verification") {
  SampledSystem z12 = make_cyclic({12});
  PointSet z = PointSet::of(12, {0, 3, 6, 9});

  ControlledMarkerWitness w{z, 3, 1, {v1(0)}};
  CHECK(verify_controlled_marker(z12, w).ok());

  ControlledMarkerWitness shifted{z, 3, 1, {v1(1)}};
  CHECK(verify_controlled_marker(z12, shifted).ok());

  ControlledMarkerWitness sparse{PointSet::of(12, {0, 6}), 3, 1, {v1(0)}};
  MarkerReport rep = verify_controlled_marker(z12, sparse);
  CHECK_FALSE(rep.covers);
  CHECK(rep.uncovered == std::vector<std::uint32_t>{3, 4, 5, 9, 10, 11});
}

TEST_CASE("cover window classes must be disjoint") {
  auto f = enum_box(BoxKind::B, 2, 1);
  CHECK_THROWS_AS(make_cover_window(f, {v1(1)}), Error);
  CoverWindow cw = make_cover_window(f, {v1(4)});
  CHECK(cw.classes.size() == 2);
  CHECK(cw.m.size() == 6); // {-1,0,1} and {3,4,5}
}

TEST_CASE("marker extension step") {
  SampledSystem z24 = make_cyclic({24});
  auto f = enum_box(BoxKind::B, 2, 1);

  SUBCASE("grows toward an unabsorbed set") {
    PointSet u = PointSet::singleton(24, 0);
    PointSet v = PointSet::singleton(24, 10);
    PointSet w = extend_marker_step(z24, u, v, f, {});
    CHECK(w == PointSet::of(24, {0, 10}));
    // postconditions, re-derived here
    CHECK(u.is_subset_of(w));
    PointSet reach(24);
    for (auto g : {-1, 0, 1}) reach |= z24.translate(w, v1(g));
    CHECK(v.is_subset_of(reach));
    CHECK_FALSE(w.intersects(z24.translate(w, v1(1))));
  }

  SUBCASE("absorbed targets change nothing") {
    PointSet u = PointSet::of(24, {0, 4});
    PointSet v = PointSet::singleton(24, 1);
    CHECK(extend_marker_step(z24, u, v, f, {}) == u);
  }

  SUBCASE("empty start") {
    PointSet w = extend_marker_step(z24, PointSet(24), PointSet::singleton(24, 5), f, {});
    CHECK(w == PointSet::singleton(24, 5));
  }

  SUBCASE("precondition failures carry witnesses") {
    CHECK_THROWS_WITH_AS(
        extend_marker_step(z24, PointSet::of(24, {0, 1}), PointSet::singleton(24, 10), f, {}),
        doctest::Contains("F-translates"), Error);
    CHECK_THROWS_WITH_AS(
        extend_marker_step(z24, PointSet::singleton(24, 0), PointSet::of(24, {10, 11}), f, {}),
        doctest::Contains("cl(V)"), Error);
    CHECK_THROWS_AS(extend_marker_step(z24, PointSet(24), PointSet::singleton(24, 3), f, {v1(1)}),
                    Error); // overlapping classes
  }
}

TEST_CASE("ball count threshold is downward closed") {
  // feasibility of the covering radius is monotone: shrinking the radius
  // never increases how many translate classes a ball can touch
  SampledSystem z16 = make_cyclic({16});
  PointSet u = PointSet::of(16, {0, 8});
  auto m = window1({-1, 0, 1, 3, 4, 5});
  std::vector<PointSet> tu;
  for (const Vec& g : m) tu.push_back(z16.translate(u, g));
  auto count_at = [&](std::uint32_t x, const Rat& delta) {
    PointSet ball = z16.fatten(PointSet::singleton(16, x), delta);
    int c = 0;
    for (const auto& t : tu)
      if (t.intersects(ball)) ++c;
    return c;
  };
  auto grid = z16.distance_grid();
  for (std::uint32_t x = 0; x < 16; ++x)
    for (std::size_t i = 1; i < grid.size(); ++i)
      CHECK(count_at(x, grid[i - 1]) <= count_at(x, grid[i]));
}

TEST_CASE("marker construction from singleton seeds") {
  SampledSystem z24 = make_cyclic({24});
  auto f2 = enum_box(BoxKind::B, 2, 1);
  MarkerWitness w = build_marker(z24, f2, {});
  CHECK(verify_marker(z24, w.marker, w.window_f, w.cover_window_m).ok());
  CHECK(w.cover_window_m.size() == 3);

  for (int n : {2, 3, 4}) {
    SampledSystem sys = make_cyclic({8 * n});
    MarkerWitness witness = build_marker(sys, enum_box(BoxKind::B, n, 1), {});
    CHECK(verify_marker(sys, witness.marker, witness.window_f, witness.cover_window_m).ok());
  }

  SampledSystem grid = make_cyclic({16, 16});
  MarkerWitness gw = build_marker(grid, enum_box(BoxKind::B, 2, 2), {});
  CHECK(verify_marker(grid, gw.marker, gw.window_f, gw.cover_window_m).ok());
  CHECK(gw.cover_window_m.size() == 9); // (B_2 - B_2)^2
}

TEST_CASE("controlled marker construction") {
  SampledSystem z64 = make_cyclic({64});
  ControlledMarkerWitness w = build_controlled_marker(z64, 4, 0);
  CHECK(w.control == 2);
  CHECK(w.translates.size() == 2);
  CHECK(verify_controlled_marker(z64, w).ok());
  CHECK(naive_controlled_check(z64, w));

  SampledSystem grid = make_cyclic({32, 32});
  ControlledMarkerWitness gw = build_controlled_marker(grid, 2, 0);
  CHECK(gw.control == 4);
  CHECK(verify_controlled_marker(grid, gw).ok());

  ControlledMarkerWitness dw = build_controlled_marker(z64, 4, 1);
  CHECK(dw.control == 4);
  CHECK(dw.translates.size() == 4);
  CHECK(verify_controlled_marker(z64, dw).ok());
  CHECK(naive_controlled_check(z64, dw));
}

TEST_CASE("construction needs freeness at the cover radius") {
  SampledSystem z4 = make_cyclic({4});
  CHECK_THROWS_WITH_AS(build_controlled_marker(z4, 4, 0), doctest::Contains("free"), Error);
}

TEST_CASE("fold steps only grow and keep earlier coverage") {
  // replicate the fold with explicit bookkeeping
  SampledSystem z32 = make_cyclic({32});
  auto f = enum_box(BoxKind::B, 3, 1);
  CoverWindow cw = make_cover_window(f, {});
  PointSet w(32);
  PointSet seen(32);
  for (std::uint32_t p = 0; p < 32; ++p) {
    seen.add(p);
    PointSet prev = w;
    w = extend_marker_step(z32, w, PointSet::singleton(32, p), f, {});
    CHECK(prev.is_subset_of(w));
    PointSet reach(32);
    for (const Vec& g : cw.m) reach |= z32.translate(w, g);
    CHECK(seen.is_subset_of(reach));
  }
  CHECK(verify_marker(z32, w, f, cw.m).ok());
}
