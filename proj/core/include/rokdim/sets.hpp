#pragma once

#include <optional>
#include <vector>

#include "rokdim/system.hpp"

namespace rokdim {

/// Pointwise image alpha^g(E).
inline PointSet translate_set(const SampledSystem& sys, const PointSet& e, const Vec& g) {
  return sys.translate(e, g);
}

/// All points within distance <= delta of E. Monotone in delta.
inline PointSet fatten(const SampledSystem& sys, const PointSet& e, const Rat& delta) {
  return sys.fatten(e, delta);
}

/// Outcome of the translate-intersection audit over a finite window M.
/// A set is (M,k)-disjoint when every k+1 distinct M-translates have empty
/// common intersection; `order` is the smallest such k.
struct DisjointnessReport {
  std::vector<Vec> window;
  /// Smallest k <= k_max making the set (M,k)-disjoint; nullopt = exceeds k_max.
  std::optional<int> order;
  /// For order k >= 2, k distinct window elements whose translates share a
  /// point (certifies the set is not (M,k-1)-disjoint). For exceeded k_max,
  /// a (k_max+1)-subset with nonempty intersection.
  std::vector<Vec> witness;
  std::uint32_t witness_point = 0;
};

/// Exhaustive search over distinct-translate subsets of M up to size
/// k_max+1, depth-first with empty-intersection pruning. Node budget guards
/// against combinatorial blowup; exceeding it raises "budget_exceeded".
DisjointnessReport disjointness_order(const SampledSystem& sys, const PointSet& e,
                                      const std::vector<Vec>& window, int k_max,
                                      std::size_t node_budget = 5'000'000);

/// True iff E is (M,k)-disjoint; cheaper entry point used by preconditions.
bool is_disjoint(const SampledSystem& sys, const PointSet& e, const std::vector<Vec>& window,
                 int k, std::size_t node_budget = 5'000'000);

/// Largest delta on the grid with fatten(E, delta) still (F,k)-disjoint.
/// Requires E itself (F,k)-disjoint; the grid defaults to the system's
/// distance grid when empty. Disjointness is antitone in delta, so this is a
/// binary search over the sorted grid.
Rat fattening_margin(const SampledSystem& sys, const PointSet& e, const std::vector<Vec>& window,
                     int k, std::vector<Rat> delta_grid = {});

} // namespace rokdim
