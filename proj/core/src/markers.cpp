#include "rokdim/markers.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace rokdim {

namespace {

bool pairwise_disjoint_translates(const SampledSystem& sys, const PointSet& closed,
                                  const std::vector<Vec>& window, Collision* out) {
  std::vector<PointSet> tr;
  tr.reserve(window.size());
  for (const Vec& g : window) tr.push_back(sys.translate(closed, g));
  for (std::size_t i = 0; i < tr.size(); ++i)
    for (std::size_t j = i + 1; j < tr.size(); ++j)
      if (tr[i].intersects(tr[j])) {
        if (out) {
          out->a = window[i];
          out->b = window[j];
          out->point = static_cast<std::uint32_t>((tr[i] & tr[j]).first());
        }
        return false;
      }
  return true;
}

std::vector<Vec> negate_window(const std::vector<Vec>& w) {
  std::vector<Vec> out;
  out.reserve(w.size());
  for (const Vec& g : w) out.push_back(-g);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

std::vector<Vec> difference_window(const std::vector<Vec>& f) {
  std::set<Vec> diffs;
  for (const Vec& a : f)
    for (const Vec& b : f) diffs.insert(a - b);
  return {diffs.begin(), diffs.end()};
}

CoverWindow make_cover_window(const std::vector<Vec>& f, const std::vector<Vec>& g_list) {
  if (f.empty()) throw Error("bad_parameter", "window F must be nonempty");
  CoverWindow cw;
  std::vector<Vec> diffs = difference_window(f);
  std::set<Vec> seen;
  Vec zero = Vec::zero(f.front().rank());
  std::vector<Vec> shifts;
  shifts.push_back(zero);
  shifts.insert(shifts.end(), g_list.begin(), g_list.end());
  for (const Vec& g : shifts) {
    std::vector<Vec> cls;
    cls.reserve(diffs.size());
    for (const Vec& dvec : diffs) {
      Vec x = g + dvec;
      if (!seen.insert(x).second)
        throw Error("classes_overlap",
                    "translate classes overlap at " + vec_str(x) + "; separation vectors too close");
      cls.push_back(x);
    }
    cw.classes.push_back(std::move(cls));
  }
  cw.m.assign(seen.begin(), seen.end());
  return cw;
}

MarkerReport verify_marker(const SampledSystem& sys, const PointSet& z,
                           const std::vector<Vec>& window_f, const std::vector<Vec>& cover_window_m) {
  MarkerReport rep;
  rep.action_isometric = sys.action_isometric();
  Collision col;
  rep.disjoint = pairwise_disjoint_translates(sys, sys.closure(z), window_f, &col);
  if (!rep.disjoint) rep.collision = col;
  PointSet covered(sys.size());
  for (const Vec& g : cover_window_m) covered |= sys.translate(z, g);
  rep.covers = covered == PointSet::full(sys.size());
  if (!rep.covers) rep.uncovered = (PointSet::full(sys.size()) - covered).members();
  return rep;
}

MarkerReport verify_controlled_marker(const SampledSystem& sys, const ControlledMarkerWitness& w) {
  MarkerReport rep;
  rep.action_isometric = sys.action_isometric();
  if (w.n < 1 || static_cast<int>(w.translates.size()) != w.control)
    throw Error("bad_parameter", "controlled witness needs n >= 1 and control == |translates|");
  std::vector<Vec> box = enum_box(BoxKind::B, w.n, sys.rank());
  Collision col;
  rep.disjoint = pairwise_disjoint_translates(sys, sys.closure(w.marker), box, &col);
  if (!rep.disjoint) rep.collision = col;
  PointSet covered(sys.size());
  for (const Vec& t : w.translates)
    for (const Vec& v : box) covered |= sys.translate(w.marker, t + v);
  rep.covers = covered == PointSet::full(sys.size());
  if (!rep.covers) rep.uncovered = (PointSet::full(sys.size()) - covered).members();
  return rep;
}

PointSet extend_marker_step(const SampledSystem& sys, const PointSet& u, const PointSet& v,
                            const std::vector<Vec>& f, const std::vector<Vec>& g_list) {
  const int d = static_cast<int>(g_list.size());
  CoverWindow cw = make_cover_window(f, g_list);
  const std::vector<Vec> m_window = cw.m;
  const std::vector<Vec> m_inv = negate_window(m_window);

  PointSet u_closed = sys.closure(u);
  PointSet v_closed = sys.closure(v);

  Collision col;
  if (!pairwise_disjoint_translates(sys, u_closed, f, &col))
    throw Error("precondition_violated",
                "F-translates of cl(U) collide: " + vec_str(col.a) + " vs " + vec_str(col.b) +
                    " at point " + std::to_string(col.point));
  if (!pairwise_disjoint_translates(sys, v_closed, m_inv, &col))
    throw Error("precondition_violated",
                "(-M)-translates of cl(V) collide: " + vec_str(col.a) + " vs " + vec_str(col.b) +
                    " at point " + std::to_string(col.point));
  PointSet boundary = u_closed - u;
  if (d == 0) {
    if (!boundary.empty())
      throw Error("precondition_violated",
                  "boundary model of U must be empty when no separation vectors are supplied");
  } else if (!is_disjoint(sys, boundary, m_window, d)) {
    throw Error("precondition_violated", "boundary model of U is not (M,d)-disjoint");
  }

  // R: the part of cl(V) not yet absorbed by M-translates of U.
  PointSet absorbed(sys.size());
  for (const Vec& g : m_window) absorbed |= sys.translate(u, g);
  PointSet r = v_closed - absorbed;

  auto verify_post = [&](const PointSet& w) {
    if (!u.is_subset_of(w))
      throw Error("postcondition_failed", "result does not contain U");
    PointSet reach(sys.size());
    for (const Vec& g : m_window) reach |= sys.translate(w, g);
    if (!v.is_subset_of(reach)) {
      PointSet missing = v - reach;
      throw Error("postcondition_failed",
                  "V not absorbed; first missing point " + std::to_string(missing.first()));
    }
    Collision c;
    if (!pairwise_disjoint_translates(sys, sys.closure(w), f, &c))
      throw Error("postcondition_failed",
                  "F-translates of the result collide: " + vec_str(c.a) + " vs " + vec_str(c.b));
  };

  if (r.empty()) {
    verify_post(u);
    return u;
  }

  // rho keeps the fattened cover of R (-M,1)-disjoint; subsets of cl(V)
  // inherit its disjointness, so the precondition of the margin search holds.
  Rat rho = fattening_margin(sys, r, m_inv, 1);

  // Largest grid delta <= rho such that every closed delta-ball around a
  // point of R meets at most d of the M-translates of cl(U). The ball at x
  // meets d+1 translates iff delta >= the (d+1)-th smallest distance from x
  // to a translate, so the feasible deltas are exactly those below the
  // minimum of that quantity over R.
  std::vector<PointSet> tu;
  tu.reserve(m_window.size());
  for (const Vec& g : m_window) tu.push_back(sys.translate(u_closed, g));

  std::optional<Rat> threshold; // first infeasible radius, nullopt = none
  std::uint32_t worst_point = 0;
  for (std::size_t p = r.first(); p != PointSet::npos; p = r.next(p)) {
    std::vector<Rat> dists;
    dists.reserve(tu.size());
    for (const PointSet& t : tu) {
      Rat best(-1);
      for (std::size_t q = t.first(); q != PointSet::npos; q = t.next(q)) {
        Rat dpq = sys.dist(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(q));
        if (best < Rat(0) || dpq < best) best = dpq;
      }
      if (!(best < Rat(0))) dists.push_back(best);
    }
    if (static_cast<int>(dists.size()) <= d) continue;
    std::nth_element(dists.begin(), dists.begin() + d, dists.end());
    Rat kth = dists[static_cast<std::size_t>(d)];
    if (!threshold || kth < *threshold) {
      threshold = kth;
      worst_point = static_cast<std::uint32_t>(p);
    }
  }

  std::optional<Rat> delta;
  for (const Rat& cand : sys.distance_grid()) {
    if (cand > rho) break;
    if (threshold && cand >= *threshold) break;
    delta = cand;
  }
  if (!delta)
    throw Error("smallness_budget",
                "no grid radius satisfies the translate-count bound; worst point " +
                    std::to_string(worst_point));

  // Greedy cover of R by closed delta-balls, smallest uncovered index first.
  std::vector<PointSet> balls;
  PointSet uncovered = r;
  while (!uncovered.empty()) {
    std::uint32_t z = static_cast<std::uint32_t>(uncovered.first());
    PointSet ball = sys.fatten(PointSet::singleton(sys.size(), z), *delta);
    uncovered -= ball;
    balls.push_back(std::move(ball));
  }

  // Color each ball with the least class whose translates of cl(U) miss it.
  std::map<Vec, std::size_t> m_index;
  for (std::size_t i = 0; i < m_window.size(); ++i) m_index[m_window[i]] = i;
  PointSet w = u;
  Vec zero = Vec::zero(sys.rank());
  for (std::size_t i = 0; i < balls.size(); ++i) {
    int color = -1;
    for (int l = 0; l <= d && color < 0; ++l) {
      bool free_class = true;
      for (const Vec& g : cw.classes[l]) {
        if (tu[m_index.at(g)].intersects(balls[i])) {
          free_class = false;
          break;
        }
      }
      if (free_class) color = l;
    }
    if (color < 0)
      throw Error("coloring_infeasible",
                  "every translate class blocks ball " + std::to_string(i));
    Vec shift = color == 0 ? zero : -g_list[static_cast<std::size_t>(color - 1)];
    w |= sys.translate(balls[i], shift);
  }

  verify_post(w);
  return w;
}

MarkerWitness build_marker(const SampledSystem& sys, const std::vector<Vec>& f,
                           const std::vector<Vec>& g_list,
                           const std::vector<PointSet>& seed_cover) {
  CoverWindow cw = make_cover_window(f, g_list);
  std::vector<Vec> m_inv = negate_window(cw.m);

  std::vector<PointSet> seeds = seed_cover;
  if (seeds.empty()) {
    seeds.reserve(sys.size());
    for (std::uint32_t p = 0; p < sys.size(); ++p)
      seeds.push_back(PointSet::singleton(sys.size(), p));
  }
  PointSet seeded(sys.size());
  for (const auto& s : seeds) seeded |= s;
  if (!(seeded == PointSet::full(sys.size())))
    throw Error("precondition_violated", "seed cover does not cover the sample");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    Collision col;
    if (!pairwise_disjoint_translates(sys, sys.closure(seeds[i]), m_inv, &col))
      throw Error("precondition_violated",
                  "seed " + std::to_string(i) + " has colliding (-M)-translates: " +
                      vec_str(col.a) + " vs " + vec_str(col.b));
  }

  PointSet w(sys.size());
  PointSet covered(sys.size()); // union of M-translates of w, kept incrementally
  PointSet seeds_so_far(sys.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    seeds_so_far |= seeds[k];
    PointSet prev = w;
    try {
      w = extend_marker_step(sys, w, seeds[k], f, g_list);
    } catch (const Error& e) {
      throw Error(e.code(), "fold step " + std::to_string(k) + ": " + e.what());
    }
    if (!prev.is_subset_of(w))
      throw Error("postcondition_failed", "fold step " + std::to_string(k) + " shrank the marker");
    PointSet grown = w - prev;
    for (const Vec& g : cw.m) covered |= sys.translate(grown, g);
    if (!seeds_so_far.is_subset_of(covered))
      throw Error("postcondition_failed",
                  "fold step " + std::to_string(k) + " lost coverage of earlier seeds");
  }

  MarkerWitness witness{w, f, cw.m};
  MarkerReport rep = verify_marker(sys, witness.marker, witness.window_f, witness.cover_window_m);
  if (!rep.ok())
    throw Error("postcondition_failed", "constructed marker fails independent verification");
  return witness;
}

ControlledMarkerWitness build_controlled_marker(const SampledSystem& sys, int n, int d) {
  if (n < 1 || d < 0) throw Error("bad_parameter", "controlled marker needs n >= 1, d >= 0");
  const int m = sys.rank();
  std::vector<Vec> f = enum_box(BoxKind::B, n, m);
  std::vector<Vec> g_list = separation_vectors(n, d, m);
  CoverWindow cw = make_cover_window(f, g_list);

  // Freeness must hold on all differences of cover-window elements; audit
  // the smallest J-window containing them.
  std::int64_t max_coord = 0;
  for (const Vec& a : cw.m)
    for (const Vec& b : cw.m) max_coord = std::max(max_coord, (a - b).norm_inf());
  int radius = static_cast<int>(max_coord) + 1;
  FreenessCertificate cert = check_free(sys, radius);
  if (!cert.free())
    throw Error("not_free_at_radius",
                "action is not free at radius " + std::to_string(radius) + "; first violation at " +
                    vec_str(cert.violations.front().g));

  MarkerWitness base = build_marker(sys, f, g_list);

  ControlledMarkerWitness witness;
  witness.marker = base.marker;
  witness.n = n;
  witness.control = (d + 1) << m;
  Vec offset = j_window_offset(n, m);
  CoveringTranslates ct = cover_translates(n, m);
  Vec zero = Vec::zero(m);
  for (int l = 0; l <= d; ++l) {
    Vec vl = l == 0 ? zero : g_list[static_cast<std::size_t>(l - 1)];
    for (const Vec& wa : ct.vectors) witness.translates.push_back(vl + wa + offset);
  }

  MarkerReport rep = verify_controlled_marker(sys, witness);
  if (!rep.ok())
    throw Error("postcondition_failed", "controlled marker fails independent verification");
  return witness;
}

} // namespace rokdim
