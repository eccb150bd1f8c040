#pragma once

#include <optional>
#include <vector>

#include "rokdim/sets.hpp"

namespace rokdim {

/// Candidate marker set Z together with the windows certifying it:
/// F-translates of the closure model of Z are pairwise disjoint, and the
/// M-translates of Z cover the whole sample.
struct MarkerWitness {
  PointSet marker;
  std::vector<Vec> window_f;
  std::vector<Vec> cover_window_m;
};

/// Marker with an explicit block decomposition of the covering:
/// X = union over l < control, v in B_n of alpha^(translates[l] + v)(Z).
struct ControlledMarkerWitness {
  PointSet marker;
  int n = 0;
  int control = 0;
  std::vector<Vec> translates;
};

struct Collision {
  Vec a, b;
  std::uint32_t point = 0;
};

/// Verification result; never thrown, failures carry a concrete witness.
struct MarkerReport {
  bool disjoint = false;
  std::optional<Collision> collision;
  bool covers = false;
  std::vector<std::uint32_t> uncovered;
  bool action_isometric = true;
  bool ok() const { return disjoint && covers; }
};

/// Checks both marker conditions exhaustively.
MarkerReport verify_marker(const SampledSystem& sys, const PointSet& z,
                           const std::vector<Vec>& window_f, const std::vector<Vec>& cover_window_m);

/// Checks the block-decomposed covering and the B_n-disjointness.
MarkerReport verify_controlled_marker(const SampledSystem& sys, const ControlledMarkerWitness& w);

/// Sorted distinct difference set {f' - f : f, f' in F}.
std::vector<Vec> difference_window(const std::vector<Vec>& f);

/// The d+1 translate classes g_l + (F - F) (g_0 = 0) and their union M.
/// Throws "classes_overlap" when the classes are not pairwise disjoint.
struct CoverWindow {
  std::vector<std::vector<Vec>> classes;
  std::vector<Vec> m;
};
CoverWindow make_cover_window(const std::vector<Vec>& f, const std::vector<Vec>& g_list);

/// One marker extension step. Grows U so that the result W still has
/// pairwise disjoint F-translates of its closure while the M-translates of W
/// absorb V. Requires: classes pairwise disjoint, F-translates of cl(U)
/// pairwise disjoint, (-M)-translates of cl(V) pairwise disjoint, and the
/// boundary model cl(U) \ U to be (M, d)-disjoint with d = g_list size.
/// All three postconditions are re-verified before returning.
PointSet extend_marker_step(const SampledSystem& sys, const PointSet& u, const PointSet& v,
                            const std::vector<Vec>& f, const std::vector<Vec>& g_list);

/// Folds extend_marker_step over a seed cover (default: one singleton per
/// point). Every seed must have pairwise disjoint (-M)-translates of its
/// closure; singletons get this from freeness at the cover-window radius.
/// The returned witness passes verify_marker with cover window M.
MarkerWitness build_marker(const SampledSystem& sys, const std::vector<Vec>& f,
                           const std::vector<Vec>& g_list,
                           const std::vector<PointSet>& seed_cover = {});

/// Controlled marker for the box window B_n with separation depth d:
/// control constant 2^m (d+1), translate list v_l + w_a + (-n+1, ..., -n+1).
/// Audits freeness at the radius the construction needs and verifies the
/// result with verify_controlled_marker before returning.
ControlledMarkerWitness build_controlled_marker(const SampledSystem& sys, int n, int d);

} // namespace rokdim
