#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rokdim/lattice.hpp"

using namespace rokdim;

namespace {

Vec v1(std::int64_t a) { return Vec({a}); }
Vec v2(std::int64_t a, std::int64_t b) { return Vec({a, b}); }

} // namespace

TEST_CASE("box enumeration is lexicographic and complete") {
  auto b21 = enum_box(BoxKind::B, 2, 1);
  REQUIRE(b21.size() == 2);
  CHECK(b21[0] == v1(0));
  CHECK(b21[1] == v1(1));

  auto j12 = enum_box(BoxKind::J, 1, 2);
  REQUIRE(j12.size() == 4);
  CHECK(j12[0] == v2(0, 0));
  CHECK(j12[1] == v2(0, 1));
  CHECK(j12[2] == v2(1, 0));
  CHECK(j12[3] == v2(1, 1));

  auto b32 = enum_box(BoxKind::B, 3, 2);
  REQUIRE(b32.size() == 9);
  CHECK(b32.front() == v2(0, 0));
  CHECK(b32.back() == v2(2, 2));
  for (std::size_t i = 1; i < b32.size(); ++i) CHECK(b32[i - 1] < b32[i]);

  CHECK_THROWS_AS(enum_box(BoxKind::B, 0, 1), Error);
  CHECK_THROWS_AS(enum_box(BoxKind::J, 1, 0), Error);

  for (int n = 1; n <= 4; ++n)
    for (int m = 1; m <= 3; ++m) {
      CHECK(enum_box(BoxKind::B, n, m).size() == static_cast<std::size_t>(std::pow(n, m)));
      CHECK(enum_box(BoxKind::J, n, m).size() == static_cast<std::size_t>(std::pow(2 * n, m)));
    }
}

TEST_CASE("tent weights") {
  CHECK(tent(2, 1) == Rat(1, 2));
  CHECK(tent(4, 0) == Rat(1));
  CHECK(tent(4, 4) == Rat(0));
  CHECK(tent(4, -3) == Rat(1, 4));
  CHECK_THROWS_AS(tent(4, 5), Error);
  CHECK_THROWS_AS(tent(4, -4), Error);

  CHECK(tent_m(3, v2(0, 0)) == Rat(1));
  // product of the per-coordinate values, checked against them directly
  CHECK(tent_m(3, v2(1, -2)) == tent(3, 1) * tent(3, -2));
  CHECK(tent_m(3, v2(1, -2)) == Rat(2, 9));
  CHECK(tent_m(2, v2(2, 0)) == Rat(0));
  CHECK_THROWS_AS(tent_m(2, v2(3, 0)), Error);
}

TEST_CASE("half-period shifts reduce into the J window") {
  CHECK(shift_s(0, 3, v2(2, -1)) == v2(2, -1));
  CHECK(shift_s(1, 2, v1(1)) == v1(-1));
  CHECK(shift_s(1, 3, v1(3)) == v1(0));
  CHECK_THROWS_AS(shift_s(1, 2, v1(3)), Error);

  // bijection of J_n and an involution, for every mask
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= 4; ++n)
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        auto window = enum_box(BoxKind::J, n, m);
        std::set<std::vector<std::int64_t>> images;
        for (const Vec& v : window) {
          Vec s = shift_s(mask, n, v);
          CHECK(in_box(BoxKind::J, n, s));
          images.insert(s.c);
          CHECK(shift_s(mask, n, s) == v);
        }
        CHECK(images.size() == window.size());
      }
}

TEST_CASE("partition weights sum to one exactly") {
  auto w = partition_weights(3, v2(0, 0));
  REQUIRE(w.size() == 4);
  CHECK(w[0] == Rat(1));
  CHECK(w[1] == Rat(0));
  CHECK(w[2] == Rat(0));
  CHECK(w[3] == Rat(0));

  auto w1 = partition_weights(3, v1(2));
  REQUIRE(w1.size() == 2);
  CHECK(w1[0] == Rat(1, 3));
  CHECK(w1[1] == Rat(2, 3));

  auto w2 = partition_weights(2, v2(1, 1));
  for (const Rat& x : w2) CHECK(x == Rat(1, 4));

  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= 4; ++n)
      for (const Vec& v : enum_box(BoxKind::J, n, m)) {
        Rat sum(0);
        for (const Rat& x : partition_weights(n, v)) sum += x;
        REQUIRE(sum == Rat(1));
      }
}

TEST_CASE("covering translates tile the doubled box") {
  auto ct = cover_translates(3, 2);
  REQUIRE(ct.vectors.size() == 4);
  std::set<std::vector<std::int64_t>> got;
  for (const Vec& w : ct.vectors) got.insert(w.c);
  std::set<std::vector<std::int64_t>> expect = {{0, 0}, {0, 3}, {3, 0}, {3, 3}};
  CHECK(got == expect);

  auto ct11 = cover_translates(1, 1);
  REQUIRE(ct11.vectors.size() == 2);
  CHECK(ct11.vectors[0] == v1(0));
  CHECK(ct11.vectors[1] == v1(1));

  // exhaustive tiling check: every vector of B_2n covered exactly once
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= (m == 3 ? 4 : 6); ++n) {
      auto trs = cover_translates(n, m);
      REQUIRE(trs.vectors.size() == (std::size_t(1) << m));
      std::map<std::vector<std::int64_t>, int> hits;
      for (const Vec& w : trs.vectors)
        for (const Vec& b : enum_box(BoxKind::B, n, m)) hits[(w + b).c]++;
      auto big = enum_box(BoxKind::B, 2 * n, m);
      REQUIRE(hits.size() == big.size());
      for (const Vec& b : big) {
        REQUIRE(hits.count(b.c) == 1);
        REQUIRE(hits[b.c] == 1);
      }
    }
}

TEST_CASE("separation vectors keep difference boxes apart") {
  auto oracle_disjoint = [](int n, const std::vector<Vec>& vl, int m) {
    std::vector<Vec> shifts;
    shifts.push_back(Vec::zero(m));
    shifts.insert(shifts.end(), vl.begin(), vl.end());
    std::map<std::vector<std::int64_t>, int> hits;
    for (const Vec& s : shifts)
      for (const Vec& d : enum_range(-(n - 1), n - 1, m)) hits[(s + d).c]++;
    for (const auto& [k, c] : hits)
      if (c > 1) return false;
    return true;
  };

  auto s = separation_vectors(2, 1, 1);
  REQUIRE(s.size() == 1);
  CHECK(s[0] == v1(4));
  CHECK(oracle_disjoint(2, s, 1));

  CHECK(separation_vectors(5, 0, 2).empty());

  auto s22 = separation_vectors(2, 2, 2);
  REQUIRE(s22.size() == 2);
  CHECK(s22[0] == v2(4, 0));
  CHECK(s22[1] == v2(8, 0));
  CHECK(oracle_disjoint(2, s22, 2));

  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= (m == 3 ? 3 : 6); ++n)
      for (int d = 0; d <= (m == 3 ? 2 : 4); ++d)
        CHECK(oracle_disjoint(n, separation_vectors(n, d, m), m));
}

TEST_CASE("tent is Lipschitz in the sup metric") {
  for (int m = 1; m <= 2; ++m)
    for (int n = 1; n <= 4; ++n) {
      auto window = enum_box(BoxKind::J, n, m);
      for (const Vec& v : window)
        for (const Vec& w : window) {
          Rat dev = tent_m(n, v) - tent_m(n, w);
          if (dev < Rat(0)) dev = -dev;
          CHECK(dev <= Rat(m * (v - w).norm_inf(), n));
        }
    }
}

TEST_CASE("rational text form") {
  CHECK(rat_str(Rat(3, 6)) == "1/2");
  CHECK(rat_str(Rat(4)) == "4");
  CHECK(rat_str(Rat(-2, 4)) == "-1/2");
  CHECK(parse_rat("3/6") == Rat(1, 2));
  CHECK(parse_rat("7") == Rat(7));
  CHECK(parse_rat("-7/1") == Rat(-7));
  CHECK_THROWS_AS(parse_rat("x"), Error);
  CHECK_THROWS_AS(parse_rat("1/0"), Error);
}

TEST_CASE("J window offset identifies the two index conventions") {
  CHECK(j_window_offset(3, 2) == v2(-2, -2));
  // B_{2n} + offset = J_n, elementwise
  for (int n = 1; n <= 3; ++n) {
    Vec off = j_window_offset(n, 2);
    auto b = enum_box(BoxKind::B, 2 * n, 2);
    for (const Vec& x : b) CHECK(in_box(BoxKind::J, n, x + off));
  }
}
