#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rokdim/sets.hpp"

using namespace rokdim;

namespace {

Vec v1(std::int64_t a) { return Vec({a}); }

std::vector<Vec> window1(std::initializer_list<std::int64_t> xs) {
  std::vector<Vec> w;
  for (auto x : xs) w.push_back(v1(x));
  return w;
}

// Brute force over all subsets of the window up to size k_max+1.
std::optional<int> oracle_order(const SampledSystem& sys, const PointSet& e,
                                const std::vector<Vec>& window, int k_max) {
  if (e.empty() || window.empty()) return 1;
  std::vector<PointSet> tr;
  for (const Vec& g : window) tr.push_back(sys.translate(e, g));
  int deepest = 1;
  const unsigned count = 1u << window.size();
  for (unsigned mask = 1; mask < count; ++mask) {
    int size = __builtin_popcount(mask);
    if (size <= deepest || size > k_max + 1) continue;
    PointSet inter = PointSet::full(sys.size());
    for (std::size_t i = 0; i < window.size(); ++i)
      if (mask & (1u << i)) inter &= tr[i];
    if (!inter.empty()) deepest = size;
  }
  if (deepest > k_max) return std::nullopt;
  return deepest;
}

} // namespace

TEST_CASE("translate and fatten basics") {
  SampledSystem z8 = make_cyclic({8});
  PointSet e = PointSet::of(8, {0, 1});
  CHECK(translate_set(z8, e, v1(3)) == PointSet::of(8, {3, 4}));
  CHECK(translate_set(z8, e, v1(0)) == e);

  SampledSystem grid = make_cyclic({4, 4});
  PointSet single = PointSet::singleton(16, 0);
  CHECK(translate_set(grid, single, Vec({1, 2})) == PointSet::singleton(16, 6));

  CHECK(fatten(z8, PointSet::singleton(8, 0), Rat(1, 8)) == PointSet::of(8, {7, 0, 1}));
  CHECK(fatten(z8, e, Rat(0)) == e);

  SampledSystem od = make_odometer(3);
  CHECK(fatten(od, PointSet::singleton(8, 0), Rat(1, 4)) == PointSet::of(8, {0, 4}));
}

TEST_CASE("fatten is monotone and equivariant for isometric actions") {
  SampledSystem z12 = make_cyclic({12});
  PointSet e = PointSet::of(12, {0, 5});
  auto grid = z12.distance_grid();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(fatten(z12, e, grid[i - 1]).is_subset_of(fatten(z12, e, grid[i])));
  }
  for (const Rat& delta : grid)
    for (std::int64_t g = -3; g <= 3; ++g)
      CHECK(translate_set(z12, fatten(z12, e, delta), v1(g)) ==
            fatten(z12, translate_set(z12, e, v1(g)), delta));
}

TEST_CASE("disjointness order examples") {
  SampledSystem z8 = make_cyclic({8});

  auto rep1 = disjointness_order(z8, PointSet::singleton(8, 0), window1({0, 1, 2}), 3);
  REQUIRE(rep1.order.has_value());
  CHECK(*rep1.order == 1);

  auto rep2 = disjointness_order(z8, PointSet::of(8, {0, 1}), window1({0, 1}), 3);
  REQUIRE(rep2.order.has_value());
  CHECK(*rep2.order == 2);
  REQUIRE(rep2.witness.size() == 2);
  // the witness pair really intersects
  PointSet inter = z8.translate(PointSet::of(8, {0, 1}), rep2.witness[0]) &
                   z8.translate(PointSet::of(8, {0, 1}), rep2.witness[1]);
  CHECK(inter.contains(rep2.witness_point));

  auto rep3 = disjointness_order(z8, PointSet::full(8), window1({0, 1}), 1);
  CHECK_FALSE(rep3.order.has_value());

  CHECK(*disjointness_order(z8, PointSet(8), window1({0, 1}), 1).order == 1);
}

TEST_CASE("disjointness order matches the subset oracle") {
  SampledSystem z16 = make_cyclic({16});
  SampledSystem od = make_odometer(4);
  std::vector<PointSet> sets = {
      PointSet::of(16, {0}),
      PointSet::of(16, {0, 1}),
      PointSet::of(16, {0, 4, 8}),
      PointSet::of(16, {0, 1, 2, 3, 8}),
      PointSet::of(16, {0, 2, 4, 6, 8, 10, 12, 14}),
  };
  std::vector<std::vector<Vec>> windows = {
      window1({0, 1}),
      window1({0, 1, 2, 3}),
      window1({-2, 0, 2, 4}),
      window1({0, 1, 2, 3, 4, 5, 6, 7}),
  };
  for (const auto& e : sets)
    for (const auto& w : windows)
      for (int k_max = 1; k_max <= 4; ++k_max) {
        CAPTURE(k_max);
        auto got = disjointness_order(z16, e, w, k_max);
        CHECK(got.order == oracle_order(z16, e, w, k_max));
        auto got_od = disjointness_order(od, e, w, k_max);
        CHECK(got_od.order == oracle_order(od, e, w, k_max));
      }
}

TEST_CASE("disjointness order is antitone in the set") {
  SampledSystem z16 = make_cyclic({16});
  PointSet big = PointSet::of(16, {0, 1, 2, 5, 9});
  PointSet small = PointSet::of(16, {0, 5, 9});
  auto w = window1({0, 1, 2, 3});
  auto ob = disjointness_order(z16, big, w, 5).order;
  auto os = disjointness_order(z16, small, w, 5).order;
  REQUIRE(ob.has_value());
  REQUIRE(os.has_value());
  CHECK(*os <= *ob);
}

TEST_CASE("search budget is enforced") {
  SampledSystem z8 = make_cyclic({8});
  std::vector<Vec> big_window;
  for (int i = -4; i <= 3; ++i) big_window.push_back(v1(i));
  // pairwise overlaps only, so the search has to walk every pair
  CHECK_THROWS_AS(disjointness_order(z8, PointSet::of(8, {0, 1}), big_window, 7, 10), Error);
}

TEST_CASE("fattening margin") {
  SampledSystem z16 = make_cyclic({16});

  CHECK(fattening_margin(z16, PointSet::singleton(16, 0), window1({0, 1, 2}), 1) == Rat(0));

  // empty set: vacuous disjointness at the largest grid radius
  CHECK(fattening_margin(z16, PointSet(16), window1({0, 1}), 1) == Rat(1, 2));

  // a custom grid finds the positive margin below the first collision radius
  std::vector<Rat> grid = {Rat(0), Rat(1, 32), Rat(1, 16)};
  CHECK(fattening_margin(z16, PointSet::of(16, {0, 8}), window1({0, 1}), 1, grid) == Rat(1, 32));

  // precondition: the set itself must be disjoint at level k
  CHECK_THROWS_AS(fattening_margin(z16, PointSet::of(16, {0, 1}), window1({0, 1}), 1), Error);
}
