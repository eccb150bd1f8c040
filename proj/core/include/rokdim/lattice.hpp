#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "rokdim/common.hpp"

namespace rokdim {

/// Element of Z^m. Coordinate count is the rank of the acting group.
struct Vec {
  std::vector<std::int64_t> c;

  Vec() = default;
  explicit Vec(std::vector<std::int64_t> coords) : c(std::move(coords)) {}
  static Vec zero(int m) { return Vec(std::vector<std::int64_t>(m, 0)); }

  int rank() const { return static_cast<int>(c.size()); }
  std::int64_t norm_inf() const;
  bool is_zero() const;

  friend Vec operator+(const Vec& a, const Vec& b);
  friend Vec operator-(const Vec& a, const Vec& b);
  friend Vec operator-(const Vec& a);
  friend bool operator==(const Vec& a, const Vec& b) { return a.c == b.c; }
  friend bool operator<(const Vec& a, const Vec& b) { return a.c < b.c; }
};

std::string vec_str(const Vec& v);

enum class BoxKind {
  B, // {0, ..., n-1}^m
  J, // {-n+1, ..., n}^m
};

/// Lexicographic enumeration, first coordinate most significant.
/// Cardinality n^m for kind B, (2n)^m for kind J.
std::vector<Vec> enum_box(BoxKind kind, int n, int m);

/// {lo, ..., hi}^m, lexicographic. Used for difference windows B_n - B_n.
std::vector<Vec> enum_range(std::int64_t lo, std::int64_t hi, int m);

/// Membership tests without enumeration.
bool in_box(BoxKind kind, int n, const Vec& v);

/// Tent weight 1 - |j|/n on the window {-n+1, ..., n}, exact.
Rat tent(int n, std::int64_t j);

/// Product tent over all coordinates of v in J_n.
Rat tent_m(int n, const Vec& v);

/// Bit i of a half-period shift pattern a in {0,1}^m, coordinate 0 as the
/// most significant bit so that ascending masks enumerate tuples
/// lexicographically.
inline int mask_bit(unsigned mask, int i, int m) {
  return static_cast<int>((mask >> (m - 1 - i)) & 1u);
}

/// Coordinatewise j_i + a_i*n reduced mod 2n into the unique representative
/// in {-n+1, ..., n}. For each fixed mask this is a bijection of J_n.
Vec shift_s(unsigned a_mask, int n, const Vec& v);

/// Weights tent_m(n, s_a(v)) for all 2^m masks, ascending mask order.
/// Their exact rational sum is 1.
std::vector<Rat> partition_weights(int n, const Vec& v);

/// The 2^m translate offsets w_a with coordinates in {0, n}; the boxes
/// w_a + B_n tile B_{2n} exactly.
struct CoveringTranslates {
  std::vector<Vec> vectors;
  int base_n = 0;
};
CoveringTranslates cover_translates(int n, int m);

/// Deterministic picks v_l = (l*2n, 0, ..., 0), l = 1..d, for which the d+1
/// translated difference boxes v_l + (B_n - B_n) are pairwise disjoint
/// (side 2n-1 vs spacing 2n).
std::vector<Vec> separation_vectors(int n, int d, int m);

/// Translation identifying B_{2n} with J_n: every coordinate -n+1.
/// Single owner of the index-shift convention between B- and J-windows.
Vec j_window_offset(int n, int m);

} // namespace rokdim
