#include "rokdim/towers.hpp"

#include <algorithm>

namespace rokdim {

namespace {

std::size_t box_index(int n, int m, const Vec& v) {
  std::size_t idx = 0;
  for (int i = 0; i < m; ++i) {
    if (v.c[i] < 0 || v.c[i] >= n) throw Error("out_of_window", "box index out of range");
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(v.c[i]);
  }
  return idx;
}

Vec mod_box(const Vec& v, int n) {
  Vec r = v;
  for (auto& x : r.c) {
    x %= n;
    if (x < 0) x += n;
  }
  return r;
}

PointSet support_of(const std::vector<Rat>& fn) {
  PointSet s(fn.size());
  for (std::uint32_t p = 0; p < fn.size(); ++p)
    if (fn[p] != Rat(0)) s.add(p);
  return s;
}

} // namespace

RokhlinCover cover_from_marker(const SampledSystem& sys, const PointSet& z, int n,
                               const std::vector<Vec>& translates) {
  if (n < 1 || translates.empty())
    throw Error("bad_parameter", "cover needs n >= 1 and at least one translate");
  RokhlinCover cover;
  cover.n = n;
  std::vector<Vec> box = enum_box(BoxKind::B, n, sys.rank());
  for (const Vec& t : translates) {
    std::vector<PointSet> tower;
    tower.reserve(box.size());
    for (const Vec& v : box) tower.push_back(sys.translate(z, t + v));
    cover.towers.push_back(std::move(tower));
  }
  CoverReport rep = verify_cover(sys, cover);
  if (!rep.ok())
    throw Error("postcondition_failed",
                "constructed cover fails verification: " +
                    (rep.equivariant ? (rep.disjoint ? "not covering" : rep.disjoint_witness)
                                     : rep.equivariance_witness));
  return cover;
}

CoverReport verify_cover(const SampledSystem& sys, const RokhlinCover& cover) {
  CoverReport rep;
  std::vector<Vec> box = enum_box(BoxKind::B, cover.n, sys.rank());
  rep.equivariant = true;
  rep.disjoint = true;
  PointSet covered(sys.size());
  for (int l = 0; l < cover.colors(); ++l) {
    const auto& tower = cover.towers[static_cast<std::size_t>(l)];
    if (tower.size() != box.size()) {
      rep.equivariant = false;
      rep.equivariance_witness = "tower " + std::to_string(l) + " has wrong cardinality";
      break;
    }
    const PointSet& base = tower[0];
    std::vector<PointSet> closures;
    closures.reserve(tower.size());
    for (std::size_t i = 0; i < tower.size(); ++i) {
      if (rep.equivariant && !(tower[i] == sys.translate(base, box[i]))) {
        rep.equivariant = false;
        rep.equivariance_witness =
            "tower " + std::to_string(l) + " level " + vec_str(box[i]) + " is not the base translate";
      }
      covered |= tower[i];
      closures.push_back(sys.closure(tower[i]));
    }
    for (std::size_t i = 0; i < closures.size() && rep.disjoint; ++i)
      for (std::size_t j = i + 1; j < closures.size(); ++j)
        if (closures[i].intersects(closures[j])) {
          rep.disjoint = false;
          rep.disjoint_witness = "tower " + std::to_string(l) + " levels " + vec_str(box[i]) +
                                 " and " + vec_str(box[j]) + " overlap";
          break;
        }
  }
  rep.covers = covered == PointSet::full(sys.size());
  if (!rep.covers) rep.uncovered = (PointSet::full(sys.size()) - covered).members();
  return rep;
}

TowerFamily towers_from_cover(const SampledSystem& sys, const RokhlinCover& cover_big,
                              int box_side, int taper_n, const Rat& delta_bump) {
  const int m = sys.rank();
  const int L = box_side, n = taper_n;
  if (L < 1 || n < 1) throw Error("bad_parameter", "box side and taper must be >= 1");
  const std::int64_t half = 4ll * L * n; // J-window side N
  if (cover_big.n != 2 * half)
    throw Error("side_mismatch", "cover side must equal 8 * box_side * taper_n; got " +
                                     std::to_string(cover_big.n) + " instead of " +
                                     std::to_string(2 * half));
  if (delta_bump < Rat(0)) throw Error("bad_parameter", "delta_bump must be >= 0");
  const int N = static_cast<int>(half);
  const std::size_t P = sys.size();

  std::vector<Vec> small_box = enum_box(BoxKind::B, L, m);
  std::vector<Vec> j_window = enum_box(BoxKind::J, N, m);
  Vec offset = j_window_offset(N, m);

  TowerFamily fam;
  fam.n = L;
  fam.provenance = TowerFamily::Provenance::Raw;

  std::vector<std::vector<std::vector<Rat>>> per_color; // [l][v][p]
  for (int l = 0; l < cover_big.colors(); ++l) {
    const auto& tower = cover_big.towers[static_cast<std::size_t>(l)];
    const PointSet& u0 = tower[box_index(cover_big.n, m, Vec::zero(m) - offset)];

    // h: 1 on U_0, distance-tapered inside the delta_bump fattening.
    std::vector<Rat> bump(P, Rat(0));
    for (std::uint32_t p = 0; p < P; ++p) {
      if (u0.contains(p)) {
        bump[p] = Rat(1);
        continue;
      }
      if (delta_bump == Rat(0)) continue;
      Rat best(-1);
      for (std::size_t q = u0.first(); q != PointSet::npos; q = u0.next(q)) {
        Rat d = sys.dist(p, static_cast<std::uint32_t>(q));
        if (best < Rat(0) || d < best) best = d;
      }
      if (best < delta_bump) bump[p] = Rat(1) - best / delta_bump;
    }

    std::vector<std::vector<Rat>> f(small_box.size(), std::vector<Rat>(P, Rat(0)));
    std::vector<PointSet> occupied(1, PointSet(P)); // per l: support union so far
    PointSet& occ = occupied[0];
    for (const Vec& w : j_window) {
      std::int64_t norm = w.norm_inf();
      Rat zone;
      if (norm <= 2ll * L * n)
        zone = Rat(1);
      else if (norm <= 3ll * L * n)
        zone = Rat(3ll * L * n - norm, static_cast<std::int64_t>(L) * n);
      else
        continue;
      Perm fwd = sys.permutation(w);
      std::size_t vi = box_index(L, m, mod_box(w, L));
      for (std::uint32_t p = 0; p < P; ++p) {
        if (bump[p] == Rat(0)) continue;
        std::uint32_t x = fwd[p];
        if (occ.contains(x))
          throw Error("delta_bump_too_large",
                      "fattened tower sets overlap at point " + std::to_string(x) + " (level " +
                          vec_str(w) + ")");
        occ.add(x);
        f[vi][x] = zone * bump[p];
      }
    }
    per_color.push_back(std::move(f));
  }

  // Half-period translates spreading the J-window into 2^m shifted blocks.
  for (int l = 0; l < cover_big.colors(); ++l) {
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      Vec aj = Vec::zero(m);
      for (int i = 0; i < m; ++i)
        aj.c[i] = static_cast<std::int64_t>(mask_bit(mask, i, m)) * 4ll * L * n - 2ll * L * n;
      Perm back = sys.permutation(-aj);
      std::vector<std::vector<Rat>> shifted(small_box.size(), std::vector<Rat>(P, Rat(0)));
      for (std::size_t vi = 0; vi < small_box.size(); ++vi)
        for (std::uint32_t p = 0; p < P; ++p)
          shifted[vi][p] = per_color[static_cast<std::size_t>(l)][vi][back[p]];
      fam.values.push_back(std::move(shifted));
    }
  }
  return fam;
}

TowerFamily indicator_family(const SampledSystem& sys, const PointSet& z, int n) {
  const int m = sys.rank();
  std::vector<Vec> box = enum_box(BoxKind::B, n, m);
  std::vector<PointSet> levels;
  levels.reserve(box.size());
  PointSet covered(sys.size());
  std::size_t total = 0;
  for (const Vec& v : box) {
    PointSet t = sys.translate(z, v);
    total += t.count();
    covered |= t;
    levels.push_back(std::move(t));
  }
  if (!(covered == PointSet::full(sys.size())) || total != sys.size())
    throw Error("not_a_tiling", "translates of the base set do not partition the sample");
  for (int i = 0; i < m; ++i) {
    Vec period = Vec::zero(m);
    period.c[i] = n;
    if (!(sys.translate(z, period) == z))
      throw Error("not_periodic", "base set is not invariant under the box period in coordinate " +
                                      std::to_string(i));
  }
  TowerFamily fam;
  fam.n = n;
  fam.provenance = TowerFamily::Provenance::Raw;
  fam.values.emplace_back();
  for (const PointSet& lvl : levels) {
    std::vector<Rat> fn(sys.size(), Rat(0));
    for (std::size_t p = lvl.first(); p != PointSet::npos; p = lvl.next(p)) fn[p] = Rat(1);
    fam.values[0].push_back(std::move(fn));
  }
  return fam;
}

TowerFamily exact_tiling_family(const SampledSystem& sys, const std::vector<int>& sizes, int side) {
  if (static_cast<int>(sizes.size()) != sys.rank())
    throw Error("bad_parameter", "sizes must match the system rank");
  for (int s : sizes)
    if (s % side != 0) throw Error("bad_parameter", "side must divide every cyclic size");
  PointSet z(sys.size());
  for (std::uint32_t p = 0; p < sys.size(); ++p) {
    std::size_t idx = p;
    bool on = true;
    for (int i = static_cast<int>(sizes.size()) - 1; i >= 0; --i) {
      if (static_cast<int>(idx % static_cast<std::size_t>(sizes[i])) % side != 0) on = false;
      idx /= static_cast<std::size_t>(sizes[i]);
    }
    if (on) z.add(p);
  }
  return indicator_family(sys, z, side);
}

TowerFamily normalize_towers(const SampledSystem& sys, const TowerFamily& family) {
  const std::size_t P = sys.size();
  std::vector<Rat> total(P, Rat(0));
  for (const auto& color : family.values)
    for (const auto& fn : color)
      for (std::uint32_t p = 0; p < P; ++p) total[p] += fn[p];
  for (std::uint32_t p = 0; p < P; ++p)
    if (total[p] < Rat(1))
      throw Error("sum_below_one", "tower sum is " + rat_str(total[p]) + " < 1 at point " +
                                       std::to_string(p));
  TowerFamily out;
  out.n = family.n;
  out.provenance = TowerFamily::Provenance::Normalized;
  out.values = family.values;
  for (auto& color : out.values)
    for (auto& fn : color)
      for (std::uint32_t p = 0; p < P; ++p)
        if (fn[p] != Rat(0)) fn[p] /= total[p];
  return out;
}

ToleranceReport verify_def_relations(const SampledSystem& sys, const TowerFamily& family) {
  const std::size_t P = sys.size();
  const int m = sys.rank();
  ToleranceReport rep;

  std::vector<Rat> total(P, Rat(0));
  for (const auto& color : family.values)
    for (const auto& fn : color)
      for (std::uint32_t p = 0; p < P; ++p) total[p] += fn[p];
  Rat max_dev(0), min_sum = total.empty() ? Rat(0) : total[0];
  for (std::uint32_t p = 0; p < P; ++p) {
    Rat dev = total[p] - Rat(1);
    if (dev < Rat(0)) dev = -dev;
    max_dev = std::max(max_dev, dev);
    min_sum = std::min(min_sum, total[p]);
  }
  rep.eps1 = max_dev;
  rep.eps1prime = min_sum - Rat(1);

  std::vector<Vec> box = enum_box(BoxKind::B, family.n, m);
  for (const auto& color : family.values) {
    std::vector<PointSet> supports;
    supports.reserve(color.size());
    for (const auto& fn : color) supports.push_back(support_of(fn));
    for (std::size_t i = 0; i < color.size(); ++i)
      for (std::size_t j = i + 1; j < color.size(); ++j) {
        if (!supports[i].intersects(supports[j])) continue;
        PointSet overlap = supports[i] & supports[j];
        for (std::size_t p = overlap.first(); p != PointSet::npos; p = overlap.next(p))
          rep.eps2 = std::max(rep.eps2, color[i][p] * color[j][p]);
      }
  }

  for (const Vec& v : box) {
    Perm back = sys.permutation(-v);
    for (const auto& color : family.values)
      for (std::size_t wi = 0; wi < box.size(); ++wi) {
        const auto& fw = color[wi];
        const auto& target = color[box_index(family.n, m, mod_box(v + box[wi], family.n))];
        for (std::uint32_t p = 0; p < P; ++p) {
          Rat dev = fw[back[p]] - target[p];
          if (dev < Rat(0)) dev = -dev;
          rep.eps3 = std::max(rep.eps3, dev);
        }
      }
  }
  return rep;
}

BoundTable report_bounds(int d, int m) {
  if (d < 0 || m < 1 || m > 19) throw Error("bad_parameter", "bounds need d >= 0, 1 <= m <= 19");
  BoundTable t;
  std::int64_t pm = std::int64_t(1) << m;
  t.dim_rok_bound = pm * (d + 1) - 1;
  t.dim_rok_cyc_bound = pm * pm * (d + 1) - 1;
  t.dim_nuc_bound = pm * pm * pm * static_cast<std::int64_t>(d + 1) * (d + 1) - 1;
  return t;
}

} // namespace rokdim
