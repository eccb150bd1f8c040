#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rokdim/towers.hpp"

namespace rokdim {

using Cplx = std::complex<double>;
/// Coefficient function on the sample, one complex value per point.
using CoefFn = std::vector<Cplx>;

/// J-shaped lattice window {-n+1, ..., n}^m with O(1) arithmetic indexing.
struct JWindow {
  int n = 0;
  int m = 0;
  JWindow() = default;
  JWindow(int n_, int m_);
  std::size_t size() const { return count_; }
  bool contains(const Vec& v) const { return in_box(BoxKind::J, n, v); }
  std::size_t index(const Vec& v) const;
  Vec element(std::size_t idx) const;

private:
  std::size_t count_ = 0;
};

/// Finite formal sum sum_v a_v u_v with function coefficients; the
/// desk-scale representation of crossed-product elements. Acts on
/// l2(window) (x) l2(sample) through the regular representation:
/// (x xi)(w, p) = sum_v a_v(alpha^w p) xi(w - v, p).
struct BandOperator {
  int rank = 0;
  std::map<Vec, CoefFn> terms;

  std::int64_t bandwidth() const;
  bool empty() const { return terms.empty(); }
};

BandOperator band_term(int rank, const Vec& v, CoefFn a);
void band_accumulate(BandOperator& op, const Vec& v, const CoefFn& a, Cplx scale = Cplx(1.0, 0.0));
BandOperator band_sub(const BandOperator& a, const BandOperator& b);
/// (a u_v)(b u_w) = a alpha^v(b) u_(v+w), extended bilinearly.
BandOperator band_mul(const SampledSystem& sys, const BandOperator& a, const BandOperator& b);
/// (a u_v)^* = conj(a) composed with alpha^v, at slot -v.
BandOperator band_adjoint(const SampledSystem& sys, const BandOperator& op);

double sup_norm(const CoefFn& a);

/// Vector on window x sample, flat layout [slot * P + p].
using WindowVector = std::vector<Cplx>;

/// Applies the compression of op to the padded window (reads outside the
/// window are zero). Exact when the input is supported far enough from the
/// boundary. Rejects pad windows smaller than the band width.
void band_apply(const SampledSystem& sys, const BandOperator& op, const JWindow& pad,
                const WindowVector& in, WindowVector& out);

/// Matrix over a J window with function entries; the image of the
/// compression map and the domain of the tower maps.
struct CompressedOperator {
  JWindow window;
  /// blocks[row * size + col]; an empty CoefFn is the zero block.
  std::vector<CoefFn> blocks;

  CoefFn& block(std::size_t row, std::size_t col) { return blocks[row * window.size() + col]; }
  const CoefFn& block(std::size_t row, std::size_t col) const {
    return blocks[row * window.size() + col];
  }
};

CompressedOperator compressed_zero(int n, int m);
CompressedOperator compressed_sub(const CompressedOperator& a, const CompressedOperator& b);
/// Block-matrix product with pointwise function multiplication.
CompressedOperator compressed_mul(const CompressedOperator& a, const CompressedOperator& b);
/// Exact operator norm: the blocks act pointwise in the sample, so the norm
/// is the max over points of the spectral norm of the scalar matrix there.
double compressed_norm(const CompressedOperator& a);

/// Compression x -> QxQ onto l2(J_n) (x) l2(sample): a single term a u_v
/// contributes the blocks (w, w - v) = a o alpha^w for w in J_n meeting
/// v + J_n. Linear in the operator.
CompressedOperator compress_psi(const SampledSystem& sys, const BandOperator& op, int n);

/// Tent-weight diagonal on the window, exact values with float square roots.
struct DiagonalWeight {
  JWindow window;
  std::vector<Rat> values;
  std::vector<double> sqrt_values;
};
DiagonalWeight diagonal_weight(int n, int m);

/// mu(x) = sqrt(D) Psi(x) sqrt(D), entrywise tent scaling of the compression.
CompressedOperator mu(const SampledSystem& sys, const BandOperator& op, int n);

/// Measured norm of [sqrt(D), Psi(a u_v)] against exhaustive coefficient
/// bounds over the window.
struct CommutatorCheck {
  double estimate = 0;    // power-iteration estimate of the commutator norm
  double sqrt_bound = 0;  // max_w |sqrt(t(w)) - sqrt(t(w-v))| * ||a||
  double tent_bound = 0;  // max_w |t(w) - t(w-v)| * ||a||
  double mu_bound = 0;    // max_w |t(w) - sqrt(t(w) t(w-v))| * ||a||, for mu vs D Psi
};
CommutatorCheck commutator_sqrtD(const SampledSystem& sys, const CoefFn& a, const Vec& v, int n);

/// sigma_p^(l) applied blockwise: e_{v,w} (x) a maps to
/// f_{s_p(v)}^(l)1/2 u_v a u_w^* f_{s_p(w)}^(l)1/2. The family must have box
/// side 2n (J-window indexing through the fixed shift convention).
BandOperator sigma_apply(const SampledSystem& sys, const TowerFamily& family, int color,
                         unsigned p_mask, const CompressedOperator& x);

/// Matrix-free norm of the band compression with inputs supported on
/// J_(base_n + bandwidth): Krylov iteration on the Gram operator, fixed
/// policy (at most 200 applications or relative Ritz change < 1e-10),
/// deterministic start vector. Converges from below.
double estimate_norm(const SampledSystem& sys, const BandOperator& op, int base_n);

struct OrthogonalPair {
  CompressedOperator a, b;
  std::string name;
};

/// Largest ||map(a) map(b)|| / (||a|| ||b||) over verified orthogonal pairs.
/// Pairs whose product is nonzero are rejected with the offending norm.
double order_zero_defect(const SampledSystem& sys,
                         const std::function<BandOperator(const CompressedOperator&)>& map_under_test,
                         const std::vector<OrthogonalPair>& pairs, int base_n);

/// Deterministic batch of orthogonal pairs in the compressed algebra:
/// block-orthogonal matrix units and function-orthogonal coefficients.
std::vector<OrthogonalPair> make_orthogonal_pairs(const SampledSystem& sys, int n);

struct CotlarReport {
  bool premise_ok = false;
  double max_pair_norm = 0;  // largest ||b_i^* b_j||, i != j
  double eta = 0;
  double delta = 0;
  double sum_norm = 0;
  double max_norm = 0;
  bool conclusion_holds = false;
};

/// Checks one instance of the almost-orthogonality bound
/// ||sum b_j|| <= delta + max ||b_j|| for contractions with pairwise
/// ||b_i^* b_j|| <= eta. Premise violations are reported, the conclusion is
/// still evaluated.
CotlarReport cotlar_bound_check(const SampledSystem& sys, const std::vector<BandOperator>& ops,
                                double eta, double delta, int base_n);

struct StepCheck {
  std::string name;
  double measured = 0;
  double budget = 0;
  bool gating = true; // informational steps report but do not gate
  bool pass = true;
};

struct PipelinePerOp {
  std::string name;
  Vec v;
  std::vector<StepCheck> steps;
  double total_defect = 0;
  double budget = 0;          // 2^(m+4) (d+1) (s+1) delta
  double per_term_budget = 0; // 2^(m+3) (d+1) (s+1) delta / |J_N|
  bool pass = true;
};

struct PipelineReport {
  int n = 0, N = 0, d = 0, s = 0, m = 0;
  double eps = 0;    // measured family defect, square-root relations included
  double delta = 0;  // back-solved tolerance driving every budget
  double delta_floor = 0;
  bool tower_sum_identity_exact = false;
  std::vector<StepCheck> family_checks;
  std::vector<PipelinePerOp> per_op;
  bool pass = true;
};

struct PipelineTestOp {
  std::string name;
  Vec v;
  CoefFn a; // sup norm at most 1
};

/// Runs the full approximation chain sigma o phi o psi o mu on every test
/// op and compares each intermediate quantity of the chain against its
/// budget. The inner approximation is the exact identity (s = 0); delta is
/// back-solved as max(3 |J_n| |J_N| eps, |J_N| (N/n)^m, floor).
PipelineReport pipeline_defect(const SampledSystem& sys, const TowerFamily& family, int n, int N,
                               const std::vector<PipelineTestOp>& test_ops, double delta_floor = 0);

/// Additive tolerance for float comparisons against exact-zero budgets.
inline constexpr double kBudgetSlack = 1e-9;

} // namespace rokdim
