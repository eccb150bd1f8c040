#include "rokdim/system.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace rokdim {

namespace {

Perm compose(const Perm& outer, const Perm& inner) {
  Perm r(inner.size());
  for (std::size_t p = 0; p < inner.size(); ++p) r[p] = outer[inner[p]];
  return r;
}

Perm invert(const Perm& g) {
  Perm r(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) r[g[p]] = static_cast<std::uint32_t>(p);
  return r;
}

} // namespace

SampledSystem::SampledSystem(std::size_t points, std::vector<Perm> generators,
                             std::vector<Rat> metric_row_major, Rat closure_eps)
    : points_(points), gens_(std::move(generators)), closure_eps_(closure_eps) {
  if (points_ == 0) throw Error("bad_parameter", "system needs at least one point");
  if (gens_.empty()) throw Error("bad_parameter", "system needs at least one generator");
  if (metric_row_major.size() != points_ * points_)
    throw Error("bad_parameter", "metric must be a full square table");
  if (closure_eps_ < Rat(0)) throw Error("bad_parameter", "closure_eps must be >= 0");

  std::int64_t lcm = 1;
  for (const Rat& r : metric_row_major) {
    lcm = std::lcm(lcm, r.denominator());
    if (lcm > (std::int64_t(1) << 40))
      throw Error("metric_denominator_overflow", "metric denominators have no small common multiple");
  }
  denom_ = lcm;
  scaled_.reserve(metric_row_major.size());
  for (const Rat& r : metric_row_major) scaled_.push_back(r.numerator() * (denom_ / r.denominator()));

  validate();
  {
    std::vector<std::int64_t> nums(scaled_.begin(), scaled_.end());
    std::sort(nums.begin(), nums.end());
    nums.erase(std::unique(nums.begin(), nums.end()), nums.end());
    grid_.reserve(nums.size());
    for (std::int64_t s : nums) grid_.emplace_back(s, denom_);
  }
  gens_inv_.reserve(gens_.size());
  for (const auto& g : gens_) gens_inv_.push_back(invert(g));
  isometric_ = true;
  for (const auto& g : gens_) {
    for (std::uint32_t p = 0; p < points_ && isometric_; ++p)
      for (std::uint32_t q = 0; q < points_; ++q)
        if (scaled_[g[p] * points_ + g[q]] != scaled_[p * points_ + q]) {
          isometric_ = false;
          break;
        }
    if (!isometric_) break;
  }
}

std::vector<Rat> SampledSystem::metric() const {
  std::vector<Rat> out;
  out.reserve(scaled_.size());
  for (std::int64_t s : scaled_) out.emplace_back(s, denom_);
  return out;
}

void SampledSystem::validate() const {
  const std::size_t P = points_;
  for (const auto& g : gens_) {
    if (g.size() != P) throw Error("bad_generator", "generator size mismatch");
    std::vector<bool> seen(P, false);
    for (auto q : g) {
      if (q >= P || seen[q]) throw Error("bad_generator", "generator is not a bijection");
      seen[q] = true;
    }
  }
  for (std::size_t i = 0; i < gens_.size(); ++i)
    for (std::size_t j = i + 1; j < gens_.size(); ++j)
      for (std::uint32_t p = 0; p < P; ++p)
        if (gens_[i][gens_[j][p]] != gens_[j][gens_[i][p]])
          throw Error("not_commuting", "generators " + std::to_string(i) + " and " +
                                           std::to_string(j) + " do not commute at point " +
                                           std::to_string(p));
  for (std::uint32_t p = 0; p < P; ++p) {
    if (scaled_[p * P + p] != 0) throw Error("bad_metric", "nonzero diagonal");
    for (std::uint32_t q = 0; q < p; ++q) {
      std::int64_t d = scaled_[p * P + q];
      if (d < 0) throw Error("bad_metric", "negative distance");
      if (d != scaled_[q * P + p]) throw Error("bad_metric", "asymmetric distance");
      if (d == 0) throw Error("bad_metric", "distinct points at distance zero");
    }
  }
  // Triangle inequality: exhaustive for small systems, strided sample above.
  auto check_triple = [&](std::uint32_t p, std::uint32_t q, std::uint32_t r) {
    if (scaled_[p * P + r] > scaled_[p * P + q] + scaled_[q * P + r])
      throw Error("bad_metric", "triangle inequality fails at (" + std::to_string(p) + "," +
                                    std::to_string(q) + "," + std::to_string(r) + ")");
  };
  if (P <= 512) {
    for (std::uint32_t p = 0; p < P; ++p)
      for (std::uint32_t q = 0; q < P; ++q)
        for (std::uint32_t r = 0; r < P; ++r) check_triple(p, q, r);
  } else {
    const std::uint32_t stride = static_cast<std::uint32_t>(P / 257 + 1);
    for (std::uint32_t p = 0; p < P; ++p)
      for (std::uint32_t q = p % stride; q < P; q += stride)
        for (std::uint32_t r = q % stride; r < P; r += stride) check_triple(p, q, r);
  }
}

std::uint32_t SampledSystem::act(const Vec& v, std::uint32_t p) const {
  if (v.rank() != rank()) throw Error("rank_mismatch", "vector rank does not match system rank");
  std::uint32_t q = p;
  for (int i = 0; i < rank(); ++i) {
    const Perm& step = v.c[i] >= 0 ? gens_[i] : gens_inv_[i];
    for (std::int64_t k = 0; k < (v.c[i] < 0 ? -v.c[i] : v.c[i]); ++k) q = step[q];
  }
  return q;
}

Perm SampledSystem::permutation(const Vec& v) const {
  if (v.rank() != rank()) throw Error("rank_mismatch", "vector rank does not match system rank");
  Perm r(points_);
  for (std::uint32_t p = 0; p < points_; ++p) r[p] = p;
  for (int i = 0; i < rank(); ++i) {
    const Perm& step = v.c[i] >= 0 ? gens_[i] : gens_inv_[i];
    for (std::int64_t k = 0; k < (v.c[i] < 0 ? -v.c[i] : v.c[i]); ++k) r = compose(step, r);
  }
  return r;
}

PointSet SampledSystem::fatten(const PointSet& e, const Rat& delta) const {
  if (delta < Rat(0)) throw Error("bad_parameter", "fatten needs delta >= 0");
  if (delta == Rat(0) || e.empty()) return e;
  PointSet out(points_);
  const auto members = e.members();
  for (std::uint32_t p = 0; p < points_; ++p) {
    if (e.contains(p)) {
      out.add(p);
      continue;
    }
    for (std::uint32_t q : members) {
      if (leq_dist(p, q, delta)) {
        out.add(p);
        break;
      }
    }
  }
  return out;
}

PointSet SampledSystem::translate(const PointSet& e, const Vec& g) const {
  PointSet out(points_);
  if (e.empty()) return out;
  // Small sets move point by point; large ones through one permutation pass.
  if (e.count() * 8 <= points_) {
    for (std::size_t p = e.first(); p != PointSet::npos; p = e.next(p))
      out.add(act(g, static_cast<std::uint32_t>(p)));
    return out;
  }
  Perm perm = permutation(g);
  for (std::size_t p = e.first(); p != PointSet::npos; p = e.next(p))
    out.add(perm[p]);
  return out;
}

PointSet SampledSystem::fixed_point_set(const Vec& g) const {
  if (g.is_zero()) throw Error("bad_parameter", "fixed_point_set excludes the identity element");
  Perm perm = permutation(g);
  PointSet out(points_);
  for (std::uint32_t p = 0; p < points_; ++p)
    if (perm[p] == p) out.add(p);
  return out;
}

FreenessCertificate check_free(const SampledSystem& sys, int radius) {
  if (radius < 1) throw Error("bad_parameter", "freeness radius must be >= 1");
  FreenessCertificate cert;
  cert.radius = radius;
  for (const Vec& g : enum_box(BoxKind::J, radius, sys.rank())) {
    if (g.is_zero()) continue;
    Perm perm = sys.permutation(g);
    for (std::uint32_t p = 0; p < sys.size(); ++p)
      if (perm[p] == p) cert.violations.push_back({g, p});
  }
  return cert;
}

SampledSystem make_cyclic(const std::vector<int>& sizes, Rat closure_eps) {
  if (sizes.empty()) throw Error("bad_parameter", "cyclic system needs at least one size");
  std::size_t P = 1;
  for (int n : sizes) {
    if (n < 2) throw Error("bad_parameter", "cyclic sizes must be >= 2");
    P *= static_cast<std::size_t>(n);
  }
  const int m = static_cast<int>(sizes.size());
  // index <-> coordinates, first coordinate most significant
  auto decode = [&](std::size_t idx) {
    std::vector<int> c(m);
    for (int i = m - 1; i >= 0; --i) {
      c[i] = static_cast<int>(idx % static_cast<std::size_t>(sizes[i]));
      idx /= static_cast<std::size_t>(sizes[i]);
    }
    return c;
  };
  auto encode = [&](const std::vector<int>& c) {
    std::size_t idx = 0;
    for (int i = 0; i < m; ++i) idx = idx * static_cast<std::size_t>(sizes[i]) + static_cast<std::size_t>(c[i]);
    return idx;
  };
  std::vector<Perm> gens(m, Perm(P));
  for (std::size_t p = 0; p < P; ++p) {
    std::vector<int> c = decode(p);
    for (int i = 0; i < m; ++i) {
      std::vector<int> cc = c;
      cc[i] = (cc[i] + 1) % sizes[i];
      gens[i][p] = static_cast<std::uint32_t>(encode(cc));
    }
  }
  std::vector<Rat> metric(P * P, Rat(0));
  for (std::size_t p = 0; p < P; ++p) {
    std::vector<int> cp = decode(p);
    for (std::size_t q = 0; q < p; ++q) {
      std::vector<int> cq = decode(q);
      Rat d(0);
      for (int i = 0; i < m; ++i) {
        int raw = std::abs(cp[i] - cq[i]);
        int circ = std::min(raw, sizes[i] - raw);
        d = std::max(d, Rat(circ, sizes[i]));
      }
      metric[p * P + q] = d;
      metric[q * P + p] = d;
    }
  }
  return SampledSystem(P, std::move(gens), std::move(metric), closure_eps);
}

SampledSystem make_odometer(int bits, Rat closure_eps) {
  if (bits < 1 || bits > 20) throw Error("bad_parameter", "odometer bits must be in 1..20");
  const std::size_t P = std::size_t(1) << bits;
  Perm gen(P);
  for (std::size_t p = 0; p < P; ++p) gen[p] = static_cast<std::uint32_t>((p + 1) % P);
  std::vector<Rat> metric(P * P, Rat(0));
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t q = 0; q < p; ++q) {
      int k = 0;
      while (((p >> k) & 1u) == ((q >> k) & 1u)) ++k;
      Rat d(1, std::int64_t(1) << k);
      metric[p * P + q] = d;
      metric[q * P + p] = d;
    }
  return SampledSystem(P, {std::move(gen)}, std::move(metric), closure_eps);
}

SampledSystem make_product(const SampledSystem& a, const SampledSystem& b) {
  const std::size_t Pa = a.size(), Pb = b.size(), P = Pa * Pb;
  std::vector<Perm> gens;
  for (const auto& g : a.generators()) {
    Perm perm(P);
    for (std::size_t p = 0; p < Pa; ++p)
      for (std::size_t q = 0; q < Pb; ++q)
        perm[p * Pb + q] = static_cast<std::uint32_t>(g[p] * Pb + q);
    gens.push_back(std::move(perm));
  }
  for (const auto& g : b.generators()) {
    Perm perm(P);
    for (std::size_t p = 0; p < Pa; ++p)
      for (std::size_t q = 0; q < Pb; ++q)
        perm[p * Pb + q] = static_cast<std::uint32_t>(p * Pb + g[q]);
    gens.push_back(std::move(perm));
  }
  std::vector<Rat> metric(P * P, Rat(0));
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t q = 0; q < p; ++q) {
      Rat d = std::max(a.dist(static_cast<std::uint32_t>(p / Pb), static_cast<std::uint32_t>(q / Pb)),
                       b.dist(static_cast<std::uint32_t>(p % Pb), static_cast<std::uint32_t>(q % Pb)));
      metric[p * P + q] = d;
      metric[q * P + p] = d;
    }
  return SampledSystem(P, std::move(gens), std::move(metric),
                       std::max(a.closure_eps(), b.closure_eps()));
}

} // namespace rokdim
