#include "rokdim/sets.hpp"

#include <algorithm>

namespace rokdim {

namespace {

struct DisjointnessSearch {
  const std::vector<PointSet>& translates;
  int max_depth; // largest subset size to explore
  std::size_t budget;
  std::size_t nodes = 0;
  // deepest nonempty intersection found
  int best_depth = 0;
  std::vector<int> best_subset;
  std::uint32_t best_point = 0;
  std::vector<int> stack;

  void run(int start, const PointSet& current, int depth) {
    if (depth >= max_depth || best_depth >= max_depth) return;
    for (int i = start; i < static_cast<int>(translates.size()); ++i) {
      if (++nodes > budget)
        throw Error("budget_exceeded",
                    "disjointness search exceeded its node budget; window too large");
      PointSet next = current & translates[i];
      if (next.empty()) continue;
      stack.push_back(i);
      if (depth + 1 > best_depth) {
        best_depth = depth + 1;
        best_subset = stack;
        best_point = static_cast<std::uint32_t>(next.first());
      }
      run(i + 1, next, depth + 1);
      stack.pop_back();
      if (best_depth >= max_depth) return;
    }
  }
};

} // namespace

DisjointnessReport disjointness_order(const SampledSystem& sys, const PointSet& e,
                                      const std::vector<Vec>& window, int k_max,
                                      std::size_t node_budget) {
  if (k_max < 1) throw Error("bad_parameter", "disjointness_order needs k_max >= 1");
  DisjointnessReport rep;
  rep.window = window;
  if (e.empty() || window.empty()) {
    rep.order = 1;
    return rep;
  }
  std::vector<PointSet> translates;
  translates.reserve(window.size());
  for (const Vec& g : window) translates.push_back(sys.translate(e, g));

  DisjointnessSearch search{translates, k_max + 1, node_budget};
  search.run(0, PointSet::full(sys.size()), 0);

  // best_depth = largest t with some t distinct translates intersecting;
  // the set is (M,k)-disjoint exactly for k >= t.
  int t = std::max(search.best_depth, 1);
  if (t <= k_max)
    rep.order = t;
  if (t >= 2) {
    for (int i : search.best_subset) rep.witness.push_back(window[i]);
    rep.witness_point = search.best_point;
  }
  return rep;
}

bool is_disjoint(const SampledSystem& sys, const PointSet& e, const std::vector<Vec>& window,
                 int k, std::size_t node_budget) {
  if (k < 0) throw Error("bad_parameter", "disjointness level must be >= 0");
  if (e.empty() || window.empty()) return true;
  if (k == 0) return false; // some single translate is nonempty
  auto rep = disjointness_order(sys, e, window, k, node_budget);
  return rep.order.has_value() && *rep.order <= k;
}

Rat fattening_margin(const SampledSystem& sys, const PointSet& e, const std::vector<Vec>& window,
                     int k, std::vector<Rat> delta_grid) {
  if (delta_grid.empty()) delta_grid = sys.distance_grid();
  std::sort(delta_grid.begin(), delta_grid.end());
  delta_grid.erase(std::unique(delta_grid.begin(), delta_grid.end()), delta_grid.end());
  if (delta_grid.empty() || delta_grid.front() > Rat(0))
    delta_grid.insert(delta_grid.begin(), Rat(0));

  if (e.empty()) return delta_grid.back();
  if (!is_disjoint(sys, e, window, k)) {
    auto rep = disjointness_order(sys, e, window, k);
    std::string names;
    for (const auto& g : rep.witness) names += vec_str(g) + " ";
    throw Error("precondition_violated",
                "set is not disjoint at the requested level before fattening; "
                "colliding translates: " + names + "at point " + std::to_string(rep.witness_point));
  }

  // invariant: grid[lo] passes, grid[hi+1..] fail
  std::size_t lo = 0, hi = delta_grid.size() - 1;
  if (is_disjoint(sys, sys.fatten(e, delta_grid[hi]), window, k)) return delta_grid[hi];
  while (lo + 1 < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (is_disjoint(sys, sys.fatten(e, delta_grid[mid]), window, k))
      lo = mid;
    else
      hi = mid;
  }
  return delta_grid[lo];
}

} // namespace rokdim
