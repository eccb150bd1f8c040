#include "rokdim/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace rokdim {

std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(std::stoll(s), 1);
    std::int64_t num = std::stoll(s.substr(0, slash));
    std::int64_t den = std::stoll(s.substr(slash + 1));
    if (den == 0) throw Error("bad_rational", "zero denominator in '" + s + "'");
    return Rat(num, den);
  } catch (const std::invalid_argument&) {
    throw Error("bad_rational", "cannot parse rational '" + s + "'");
  } catch (const std::out_of_range&) {
    throw Error("bad_rational", "rational out of range '" + s + "'");
  }
}

std::int64_t Vec::norm_inf() const {
  std::int64_t best = 0;
  for (auto x : c) best = std::max(best, x < 0 ? -x : x);
  return best;
}

bool Vec::is_zero() const {
  for (auto x : c)
    if (x != 0) return false;
  return true;
}

Vec operator+(const Vec& a, const Vec& b) {
  if (a.rank() != b.rank()) throw Error("rank_mismatch", "vector rank mismatch");
  Vec r = a;
  for (int i = 0; i < a.rank(); ++i) r.c[i] += b.c[i];
  return r;
}

Vec operator-(const Vec& a, const Vec& b) {
  if (a.rank() != b.rank()) throw Error("rank_mismatch", "vector rank mismatch");
  Vec r = a;
  for (int i = 0; i < a.rank(); ++i) r.c[i] -= b.c[i];
  return r;
}

Vec operator-(const Vec& a) {
  Vec r = a;
  for (auto& x : r.c) x = -x;
  return r;
}

std::string vec_str(const Vec& v) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < v.rank(); ++i) {
    if (i) os << ',';
    os << v.c[i];
  }
  os << ')';
  return os.str();
}

std::vector<Vec> enum_range(std::int64_t lo, std::int64_t hi, int m) {
  if (m < 1) throw Error("bad_parameter", "rank must be positive");
  if (hi < lo) return {};
  std::size_t side = static_cast<std::size_t>(hi - lo + 1);
  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= side;
  std::vector<Vec> out;
  out.reserve(total);
  Vec v(std::vector<std::int64_t>(m, lo));
  for (std::size_t k = 0; k < total; ++k) {
    out.push_back(v);
    for (int i = m - 1; i >= 0; --i) {
      if (++v.c[i] <= hi) break;
      v.c[i] = lo;
    }
  }
  return out;
}

std::vector<Vec> enum_box(BoxKind kind, int n, int m) {
  if (n < 1 || m < 1) throw Error("bad_parameter", "window size and rank must be positive");
  return kind == BoxKind::B ? enum_range(0, n - 1, m)
                            : enum_range(-static_cast<std::int64_t>(n) + 1, n, m);
}

bool in_box(BoxKind kind, int n, const Vec& v) {
  for (auto x : v.c) {
    if (kind == BoxKind::B) {
      if (x < 0 || x >= n) return false;
    } else {
      if (x < -n + 1 || x > n) return false;
    }
  }
  return true;
}

Rat tent(int n, std::int64_t j) {
  if (n < 1) throw Error("bad_parameter", "tent needs n >= 1");
  if (j < -n + 1 || j > n)
    throw Error("out_of_window", "tent index " + std::to_string(j) +
                                     " outside {-n+1,...,n} for n=" + std::to_string(n));
  return Rat(n - (j < 0 ? -j : j), n);
}

Rat tent_m(int n, const Vec& v) {
  Rat p(1, 1);
  for (auto j : v.c) p *= tent(n, j);
  return p;
}

Vec shift_s(unsigned a_mask, int n, const Vec& v) {
  const int m = v.rank();
  if (!in_box(BoxKind::J, n, v))
    throw Error("out_of_window", "shift input " + vec_str(v) + " outside J_" + std::to_string(n));
  Vec r = v;
  for (int i = 0; i < m; ++i) {
    if (mask_bit(a_mask, i, m)) {
      std::int64_t j = r.c[i] + n;
      if (j > n) j -= 2 * n; // reduce into {-n+1, ..., n}
      r.c[i] = j;
    }
  }
  return r;
}

std::vector<Rat> partition_weights(int n, const Vec& v) {
  const int m = v.rank();
  if (!in_box(BoxKind::J, n, v))
    throw Error("out_of_window", "weight input " + vec_str(v) + " outside J_" + std::to_string(n));
  std::vector<Rat> out;
  out.reserve(1u << m);
  for (unsigned mask = 0; mask < (1u << m); ++mask)
    out.push_back(tent_m(n, shift_s(mask, n, v)));
  return out;
}

CoveringTranslates cover_translates(int n, int m) {
  if (n < 1 || m < 1) throw Error("bad_parameter", "cover_translates needs n, m >= 1");
  CoveringTranslates ct;
  ct.base_n = n;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    Vec w = Vec::zero(m);
    for (int i = 0; i < m; ++i) w.c[i] = static_cast<std::int64_t>(mask_bit(mask, i, m)) * n;
    ct.vectors.push_back(w);
  }
  return ct;
}

std::vector<Vec> separation_vectors(int n, int d, int m) {
  if (n < 1 || m < 1 || d < 0) throw Error("bad_parameter", "separation_vectors needs n,m >= 1, d >= 0");
  std::vector<Vec> out;
  for (int l = 1; l <= d; ++l) {
    Vec v = Vec::zero(m);
    v.c[0] = static_cast<std::int64_t>(l) * 2 * n;
    out.push_back(v);
  }
  return out;
}

Vec j_window_offset(int n, int m) {
  return Vec(std::vector<std::int64_t>(m, -static_cast<std::int64_t>(n) + 1));
}

} // namespace rokdim
