#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rokdim/common.hpp"
#include "rokdim/lattice.hpp"
#include "rokdim/pointset.hpp"

namespace rokdim {

using Perm = std::vector<std::uint32_t>;

/// Finite sampled stand-in for a compact metric space with m commuting
/// homeomorphisms: P points, an exact rational metric, and one bijection per
/// group generator. Immutable after construction; all queries are read-only.
class SampledSystem {
public:
  /// Builds from explicit data and validates: every generator a bijection,
  /// generators pairwise commuting, metric symmetric with zero diagonal and
  /// triangle inequality (exhaustive up to 512 points, sampled above).
  SampledSystem(std::size_t points, std::vector<Perm> generators,
                std::vector<Rat> metric_row_major, Rat closure_eps = Rat(0));

  std::size_t size() const { return points_; }
  int rank() const { return static_cast<int>(gens_.size()); }
  Rat closure_eps() const { return closure_eps_; }

  /// True when every generator preserves the metric; powers then do too.
  bool action_isometric() const { return isometric_; }

  Rat dist(std::uint32_t p, std::uint32_t q) const {
    return Rat(scaled_[p * points_ + q], denom_);
  }
  /// Full metric table in rationals (serialization).
  std::vector<Rat> metric() const;
  const std::vector<Perm>& generators() const { return gens_; }

  /// alpha^v applied to one point.
  std::uint32_t act(const Vec& v, std::uint32_t p) const;

  /// alpha^v as a permutation of all points.
  Perm permutation(const Vec& v) const;

  /// Sorted distinct pairwise distances, starting at 0. These are the only
  /// radii at which metric balls change. Computed once at construction.
  const std::vector<Rat>& distance_grid() const { return grid_; }

  /// Points within distance <= delta of E.
  PointSet fatten(const PointSet& e, const Rat& delta) const;

  /// fatten by the configured closure_eps; the finite-sample closure model.
  PointSet closure(const PointSet& e) const { return fatten(e, closure_eps_); }

  PointSet translate(const PointSet& e, const Vec& g) const;

  /// Points fixed by alpha^g, g != 0.
  PointSet fixed_point_set(const Vec& g) const;

private:
  std::size_t points_;
  std::vector<Perm> gens_;
  std::vector<Perm> gens_inv_;
  /// Distances stored as integers over one common denominator; all metric
  /// decisions are exact integer comparisons.
  std::vector<std::int64_t> scaled_;
  std::int64_t denom_ = 1;
  std::vector<Rat> grid_;
  Rat closure_eps_;
  bool isometric_ = false;

  bool leq_dist(std::uint32_t p, std::uint32_t q, const Rat& bound) const {
    return static_cast<__int128>(scaled_[p * points_ + q]) * bound.denominator() <=
           static_cast<__int128>(bound.numerator()) * denom_;
  }

  void validate() const;
};

struct FreenessViolation {
  Vec g;
  std::uint32_t fixed_point;
};

/// Result of auditing alpha^g for fixed points over all g in J_R \ {0}.
struct FreenessCertificate {
  int radius = 0;
  std::vector<FreenessViolation> violations;
  bool free() const { return violations.empty(); }
};

FreenessCertificate check_free(const SampledSystem& sys, int radius);

/// Product of cyclic groups Z/N_1 x ... x Z/N_m, generator i adds 1 in
/// coordinate i; metric is the normalized sup of circle distances.
/// Point index encodes coordinates mixed-radix, first coordinate most
/// significant.
SampledSystem make_cyclic(const std::vector<int>& sizes, Rat closure_eps = Rat(0));

/// Binary +1 with carry on {0,1}^bits (bit 0 least significant);
/// d(x,y) = 2^-(first differing bit index).
SampledSystem make_odometer(int bits, Rat closure_eps = Rat(0));

/// Product system: pairs of points, max metric, generators act on their
/// factor. Index = index1 * size2 + index2.
SampledSystem make_product(const SampledSystem& a, const SampledSystem& b);

} // namespace rokdim
