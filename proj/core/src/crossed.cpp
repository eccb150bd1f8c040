#include "rokdim/crossed.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace rokdim {

namespace {

// Deterministic start vectors for the power iteration; no entropy source.
struct SplitMix {
  std::uint64_t state;
  explicit SplitMix(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double unit() { return static_cast<double>(next() >> 11) / 9007199254740992.0 * 2.0 - 1.0; }
};

double vec_norm(const WindowVector& v) {
  double s = 0;
  for (const Cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

Cplx vec_dot(const WindowVector& a, const WindowVector& b) {
  Cplx s(0, 0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Largest eigenvalue of the Gram operator via Krylov iteration on the input
// subspace, deterministic start, at most 200 operator applications, stop
// when the top Ritz value's relative change drops below 1e-10. The Ritz
// value is a Rayleigh quotient, so the estimate never exceeds the true norm.
template <typename ApplyGram>
double krylov_gram_norm(std::size_t dim, const std::vector<std::size_t>& support,
                        ApplyGram&& gram) {
  WindowVector v(dim, Cplx(0, 0));
  SplitMix rng(0x5EEDC0FFEEull);
  for (std::size_t i : support) v[i] = Cplx(rng.unit(), rng.unit());
  double nv = vec_norm(v);
  if (nv == 0) return 0;
  for (auto& c : v) c /= nv;

  const int max_applies = 200;
  const int cycle_len = 100;
  int applies = 0;
  double best = 0, prev = -1;
  WindowVector w(dim);
  while (applies < max_applies) {
    std::vector<WindowVector> basis;
    std::vector<double> alpha, beta;
    basis.push_back(v);
    bool converged = false;
    while (applies < max_applies && static_cast<int>(alpha.size()) < cycle_len) {
      gram(basis.back(), w);
      ++applies;
      // tridiagonal coefficients with full reorthogonalization
      double a = vec_dot(basis.back(), w).real();
      alpha.push_back(a);
      for (const auto& b : basis) {
        Cplx proj = vec_dot(b, w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= proj * b[i];
      }
      double nb = vec_norm(w);
      // top Ritz value of the current tridiagonal
      const int k = static_cast<int>(alpha.size());
      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
      for (int i = 0; i < k; ++i) {
        tri(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
      best = std::max(0.0, es.eigenvalues()(k - 1));
      if (prev >= 0 && std::abs(best - prev) <= 1e-10 * std::max(best, 1e-30)) {
        converged = true;
        prev = best;
        break;
      }
      prev = best;
      if (nb <= 1e-13 * std::max(1.0, best)) {
        converged = true; // invariant subspace reached
        break;
      }
      beta.push_back(nb);
      for (auto& c : w) c /= nb;
      basis.push_back(w);
    }
    if (converged || applies >= max_applies) break;
    // restart from the top Ritz vector
    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      tri(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    Eigen::VectorXd top = es.eigenvectors().col(k - 1);
    WindowVector next(dim, Cplx(0, 0));
    for (int i = 0; i < k; ++i)
      for (std::size_t j = 0; j < dim; ++j) next[j] += top(i) * basis[static_cast<std::size_t>(i)][j];
    double nn = vec_norm(next);
    if (nn == 0) break;
    for (auto& c : next) c /= nn;
    v = std::move(next);
  }
  return std::sqrt(std::max(best, 0.0));
}

struct PermCache {
  const SampledSystem& sys;
  std::map<Vec, Perm> cache;
  explicit PermCache(const SampledSystem& s) : sys(s) {}
  const Perm& of(const Vec& v) {
    auto it = cache.find(v);
    if (it != cache.end()) return it->second;
    return cache.emplace(v, sys.permutation(v)).first->second;
  }
};

// alpha-bar^v(f): value at p is f(alpha^-v(p)).
CoefFn act_on(const SampledSystem& sys, PermCache& perms, const Vec& v, const CoefFn& f) {
  const Perm& back = perms.of(-v);
  CoefFn out(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) out[p] = f[back[p]];
  return out;
}

std::size_t family_box_index(const TowerFamily& family, int m, const Vec& j_index) {
  Vec b = j_index - j_window_offset(family.n / 2, m);
  std::size_t idx = 0;
  for (int i = 0; i < m; ++i) {
    if (b.c[i] < 0 || b.c[i] >= family.n)
      throw Error("index_mismatch", "tower index outside the family box");
    idx = idx * static_cast<std::size_t>(family.n) + static_cast<std::size_t>(b.c[i]);
  }
  return idx;
}

} // namespace

JWindow::JWindow(int n_, int m_) : n(n_), m(m_) {
  if (n < 1 || m < 1) throw Error("bad_parameter", "window needs n, m >= 1");
  count_ = 1;
  for (int i = 0; i < m; ++i) count_ *= static_cast<std::size_t>(2 * n);
}

std::size_t JWindow::index(const Vec& v) const {
  if (v.rank() != m || !contains(v)) throw Error("out_of_window", "vector outside J window");
  std::size_t idx = 0;
  for (int i = 0; i < m; ++i)
    idx = idx * static_cast<std::size_t>(2 * n) + static_cast<std::size_t>(v.c[i] + n - 1);
  return idx;
}

Vec JWindow::element(std::size_t idx) const {
  Vec v = Vec::zero(m);
  for (int i = m - 1; i >= 0; --i) {
    v.c[i] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(2 * n)) - n + 1;
    idx /= static_cast<std::size_t>(2 * n);
  }
  return v;
}

std::int64_t BandOperator::bandwidth() const {
  std::int64_t bw = 0;
  for (const auto& [v, a] : terms) bw = std::max(bw, v.norm_inf());
  return bw;
}

BandOperator band_term(int rank, const Vec& v, CoefFn a) {
  if (v.rank() != rank) throw Error("rank_mismatch", "term vector rank mismatch");
  BandOperator op;
  op.rank = rank;
  op.terms.emplace(v, std::move(a));
  return op;
}

void band_accumulate(BandOperator& op, const Vec& v, const CoefFn& a, Cplx scale) {
  auto it = op.terms.find(v);
  if (it == op.terms.end()) {
    CoefFn scaled(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) scaled[p] = scale * a[p];
    op.terms.emplace(v, std::move(scaled));
    return;
  }
  for (std::size_t p = 0; p < a.size(); ++p) it->second[p] += scale * a[p];
}

BandOperator band_sub(const BandOperator& a, const BandOperator& b) {
  BandOperator out = a;
  out.rank = a.rank ? a.rank : b.rank;
  for (const auto& [v, fn] : b.terms) band_accumulate(out, v, fn, Cplx(-1.0, 0.0));
  return out;
}

BandOperator band_mul(const SampledSystem& sys, const BandOperator& a, const BandOperator& b) {
  PermCache perms(sys);
  BandOperator out;
  out.rank = a.rank;
  for (const auto& [v, av] : a.terms)
    for (const auto& [w, bw] : b.terms) {
      CoefFn moved = act_on(sys, perms, v, bw);
      for (std::size_t p = 0; p < moved.size(); ++p) moved[p] *= av[p];
      band_accumulate(out, v + w, moved);
    }
  return out;
}

BandOperator band_adjoint(const SampledSystem& sys, const BandOperator& op) {
  PermCache perms(sys);
  BandOperator out;
  out.rank = op.rank;
  for (const auto& [v, a] : op.terms) {
    CoefFn conj_a(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) conj_a[p] = std::conj(a[p]);
    band_accumulate(out, -v, act_on(sys, perms, -v, conj_a));
  }
  return out;
}

double sup_norm(const CoefFn& a) {
  double s = 0;
  for (const Cplx& x : a) s = std::max(s, std::abs(x));
  return s;
}

void band_apply(const SampledSystem& sys, const BandOperator& op, const JWindow& pad,
                const WindowVector& in, WindowVector& out) {
  const std::size_t P = sys.size();
  if (pad.n < static_cast<int>(op.bandwidth()) + 1)
    throw Error("insufficient_padding", "window side must exceed the operator band width");
  if (in.size() != pad.size() * P) throw Error("bad_parameter", "vector does not match the window");
  out.assign(pad.size() * P, Cplx(0, 0));
  PermCache perms(sys);
  for (std::size_t wi = 0; wi < pad.size(); ++wi) {
    Vec w = pad.element(wi);
    const Perm& fwd = perms.of(w);
    for (const auto& [v, a] : op.terms) {
      Vec src = w - v;
      if (!pad.contains(src)) continue;
      const std::size_t si = pad.index(src);
      const Cplx* inp = in.data() + si * P;
      Cplx* outp = out.data() + wi * P;
      for (std::size_t p = 0; p < P; ++p) outp[p] += a[fwd[p]] * inp[p];
    }
  }
}

CompressedOperator compressed_zero(int n, int m) {
  CompressedOperator c;
  c.window = JWindow(n, m);
  c.blocks.assign(c.window.size() * c.window.size(), CoefFn{});
  return c;
}

CompressedOperator compressed_sub(const CompressedOperator& a, const CompressedOperator& b) {
  CompressedOperator out = a;
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    const CoefFn& bb = b.blocks[i];
    if (bb.empty()) continue;
    CoefFn& ob = out.blocks[i];
    if (ob.empty()) ob.assign(bb.size(), Cplx(0, 0));
    for (std::size_t p = 0; p < bb.size(); ++p) ob[p] -= bb[p];
  }
  return out;
}

CompressedOperator compressed_mul(const CompressedOperator& a, const CompressedOperator& b) {
  const std::size_t S = a.window.size();
  CompressedOperator out = compressed_zero(a.window.n, a.window.m);
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t j = 0; j < S; ++j) {
      const CoefFn& ab = a.block(i, j);
      if (ab.empty()) continue;
      for (std::size_t k = 0; k < S; ++k) {
        const CoefFn& bb = b.block(j, k);
        if (bb.empty()) continue;
        CoefFn& ob = out.block(i, k);
        if (ob.empty()) ob.assign(ab.size(), Cplx(0, 0));
        for (std::size_t p = 0; p < ab.size(); ++p) ob[p] += ab[p] * bb[p];
      }
    }
  return out;
}

double compressed_norm(const CompressedOperator& a) {
  const std::size_t S = a.window.size();
  std::size_t P = 0;
  for (const auto& blk : a.blocks)
    if (!blk.empty()) {
      P = blk.size();
      break;
    }
  if (P == 0) return 0;
  double best = 0;
  Eigen::MatrixXcd mat(S, S);
  for (std::size_t p = 0; p < P; ++p) {
    mat.setZero();
    for (std::size_t i = 0; i < S; ++i)
      for (std::size_t j = 0; j < S; ++j) {
        const CoefFn& blk = a.block(i, j);
        if (!blk.empty()) mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = blk[p];
      }
    best = std::max(best, mat.operatorNorm());
  }
  return best;
}

CompressedOperator compress_psi(const SampledSystem& sys, const BandOperator& op, int n) {
  CompressedOperator out = compressed_zero(n, sys.rank());
  const std::size_t P = sys.size();
  PermCache perms(sys);
  for (const auto& [v, a] : op.terms) {
    for (std::size_t wi = 0; wi < out.window.size(); ++wi) {
      Vec w = out.window.element(wi);
      Vec src = w - v;
      if (!out.window.contains(src)) continue;
      const Perm& fwd = perms.of(w);
      CoefFn& blk = out.block(wi, out.window.index(src));
      if (blk.empty()) blk.assign(P, Cplx(0, 0));
      for (std::size_t p = 0; p < P; ++p) blk[p] += a[fwd[p]];
    }
  }
  return out;
}

DiagonalWeight diagonal_weight(int n, int m) {
  DiagonalWeight d;
  d.window = JWindow(n, m);
  d.values.reserve(d.window.size());
  d.sqrt_values.reserve(d.window.size());
  for (std::size_t i = 0; i < d.window.size(); ++i) {
    Rat t = tent_m(n, d.window.element(i));
    d.values.push_back(t);
    d.sqrt_values.push_back(std::sqrt(to_double(t)));
  }
  return d;
}

CompressedOperator mu(const SampledSystem& sys, const BandOperator& op, int n) {
  CompressedOperator c = compress_psi(sys, op, n);
  DiagonalWeight d = diagonal_weight(n, sys.rank());
  for (std::size_t i = 0; i < c.window.size(); ++i)
    for (std::size_t j = 0; j < c.window.size(); ++j) {
      CoefFn& blk = c.block(i, j);
      if (blk.empty()) continue;
      double scale = d.sqrt_values[i] * d.sqrt_values[j];
      for (auto& x : blk) x *= scale;
    }
  return c;
}

namespace {

double compressed_estimate_norm(const CompressedOperator& c) {
  const std::size_t S = c.window.size();
  std::size_t P = 0;
  for (const auto& blk : c.blocks)
    if (!blk.empty()) {
      P = blk.size();
      break;
    }
  if (P == 0) return 0;
  const std::size_t dim = S * P;
  std::vector<std::size_t> support(dim);
  for (std::size_t i = 0; i < dim; ++i) support[i] = i;
  auto apply = [&](const WindowVector& in, WindowVector& out) {
    out.assign(dim, Cplx(0, 0));
    for (std::size_t i = 0; i < S; ++i)
      for (std::size_t j = 0; j < S; ++j) {
        const CoefFn& blk = c.block(i, j);
        if (blk.empty()) continue;
        for (std::size_t p = 0; p < P; ++p) out[i * P + p] += blk[p] * in[j * P + p];
      }
  };
  auto apply_adj = [&](const WindowVector& in, WindowVector& out) {
    out.assign(dim, Cplx(0, 0));
    for (std::size_t i = 0; i < S; ++i)
      for (std::size_t j = 0; j < S; ++j) {
        const CoefFn& blk = c.block(i, j);
        if (blk.empty()) continue;
        for (std::size_t p = 0; p < P; ++p) out[j * P + p] += std::conj(blk[p]) * in[i * P + p];
      }
  };
  WindowVector mid(dim);
  return krylov_gram_norm(dim, support, [&](const WindowVector& x, WindowVector& z) {
    apply(x, mid);
    apply_adj(mid, z);
  });
}

} // namespace

CommutatorCheck commutator_sqrtD(const SampledSystem& sys, const CoefFn& a, const Vec& v, int n) {
  const int m = sys.rank();
  CompressedOperator psi = compress_psi(sys, band_term(m, v, a), n);
  DiagonalWeight d = diagonal_weight(n, m);
  CompressedOperator comm = compressed_zero(n, m);
  for (std::size_t i = 0; i < psi.window.size(); ++i)
    for (std::size_t j = 0; j < psi.window.size(); ++j) {
      const CoefFn& blk = psi.block(i, j);
      if (blk.empty()) continue;
      double scale = d.sqrt_values[i] - d.sqrt_values[j];
      CoefFn& out = comm.block(i, j);
      out.assign(blk.size(), Cplx(0, 0));
      for (std::size_t p = 0; p < blk.size(); ++p) out[p] = scale * blk[p];
    }

  CommutatorCheck check;
  check.estimate = compressed_estimate_norm(comm);
  double na = sup_norm(a);
  JWindow win(n, m);
  for (std::size_t wi = 0; wi < win.size(); ++wi) {
    Vec w = win.element(wi);
    Vec src = w - v;
    if (!win.contains(src)) continue;
    double tw = to_double(tent_m(n, w));
    double ts = to_double(tent_m(n, src));
    check.sqrt_bound = std::max(check.sqrt_bound, std::abs(std::sqrt(tw) - std::sqrt(ts)) * na);
    check.tent_bound = std::max(check.tent_bound, std::abs(tw - ts) * na);
    check.mu_bound = std::max(check.mu_bound, std::abs(tw - std::sqrt(tw * ts)) * na);
  }
  return check;
}

BandOperator sigma_apply(const SampledSystem& sys, const TowerFamily& family, int color,
                         unsigned p_mask, const CompressedOperator& x) {
  const int n = x.window.n;
  const int m = x.window.m;
  const std::size_t P = sys.size();
  if (family.n != 2 * n)
    throw Error("index_mismatch", "tower family side must be twice the window parameter");
  if (color < 0 || color >= family.colors())
    throw Error("index_mismatch", "tower color out of range");

  // f_{s_p(u)}^(1/2) per window slot
  std::vector<std::vector<double>> fsqrt(x.window.size());
  for (std::size_t ui = 0; ui < x.window.size(); ++ui) {
    Vec su = shift_s(p_mask, n, x.window.element(ui));
    const auto& fn = family.values[static_cast<std::size_t>(color)][family_box_index(family, m, su)];
    fsqrt[ui].resize(P);
    for (std::size_t p = 0; p < P; ++p) fsqrt[ui][p] = std::sqrt(to_double(fn[p]));
  }

  PermCache perms(sys);
  BandOperator out;
  out.rank = m;
  CoefFn coef(P);
  for (std::size_t vi = 0; vi < x.window.size(); ++vi)
    for (std::size_t wi = 0; wi < x.window.size(); ++wi) {
      const CoefFn& blk = x.block(vi, wi);
      if (blk.empty()) continue;
      Vec v = x.window.element(vi);
      Vec w = x.window.element(wi);
      Vec shift = v - w;
      const Perm& back_v = perms.of(-v);
      const Perm& back_shift = perms.of(-shift);
      const std::vector<double>& fv = fsqrt[vi];
      const std::vector<double>& fw = fsqrt[wi];
      for (std::size_t p = 0; p < P; ++p)
        coef[p] = fv[p] * blk[back_v[p]] * fw[back_shift[p]];
      band_accumulate(out, shift, coef);
    }
  return out;
}

double estimate_norm(const SampledSystem& sys, const BandOperator& op, int base_n) {
  if (op.empty()) return 0;
  if (base_n < 1) throw Error("bad_parameter", "estimate_norm needs base_n >= 1");
  const std::size_t P = sys.size();
  const int bw = static_cast<int>(op.bandwidth());
  const int support_n = base_n + bw;
  JWindow pad(support_n + 2 * bw + 1, sys.rank());
  JWindow support(support_n, sys.rank());
  const std::size_t dim = pad.size() * P;

  std::vector<std::size_t> support_idx;
  support_idx.reserve(support.size() * P);
  for (std::size_t i = 0; i < support.size(); ++i) {
    std::size_t pi = pad.index(support.element(i));
    for (std::size_t p = 0; p < P; ++p) support_idx.push_back(pi * P + p);
  }
  std::vector<char> keep(dim, 0);
  for (std::size_t i : support_idx) keep[i] = 1;

  BandOperator adj = band_adjoint(sys, op);
  WindowVector mid(dim);
  return krylov_gram_norm(dim, support_idx, [&](const WindowVector& x, WindowVector& z) {
    band_apply(sys, op, pad, x, mid);
    band_apply(sys, adj, pad, mid, z);
    for (std::size_t i = 0; i < dim; ++i)
      if (!keep[i]) z[i] = Cplx(0, 0);
  });
}

double order_zero_defect(const SampledSystem& sys,
                         const std::function<BandOperator(const CompressedOperator&)>& map_under_test,
                         const std::vector<OrthogonalPair>& pairs, int base_n) {
  double defect = 0;
  for (const auto& pair : pairs) {
    double product_norm = compressed_norm(compressed_mul(pair.a, pair.b));
    if (product_norm > 1e-14)
      throw Error("not_orthogonal", "pair '" + pair.name + "' has product norm " +
                                        std::to_string(product_norm));
    double na = compressed_norm(pair.a);
    double nb = compressed_norm(pair.b);
    if (na == 0 || nb == 0) continue;
    BandOperator image = band_mul(sys, map_under_test(pair.a), map_under_test(pair.b));
    defect = std::max(defect, estimate_norm(sys, image, base_n) / (na * nb));
  }
  return defect;
}

std::vector<OrthogonalPair> make_orthogonal_pairs(const SampledSystem& sys, int n) {
  const int m = sys.rank();
  const std::size_t P = sys.size();
  JWindow win(n, m);
  SplitMix rng(0xABCDEF12345ull);
  auto unit_fn = [&](bool random_values) {
    CoefFn f(P);
    for (std::size_t p = 0; p < P; ++p)
      f[p] = random_values ? Cplx(rng.unit(), rng.unit()) * 0.5 : Cplx(1, 0);
    return f;
  };
  auto matrix_unit = [&](std::size_t row, std::size_t col, CoefFn f) {
    CompressedOperator c = compressed_zero(n, m);
    c.block(row, col) = std::move(f);
    return c;
  };
  std::vector<OrthogonalPair> pairs;
  const std::size_t S = win.size();
  // block-orthogonal matrix units: col of the first misses row of the second
  pairs.push_back({matrix_unit(0, 1 % S, unit_fn(false)), matrix_unit(S - 1, 0, unit_fn(false)),
                   "block_units"});
  pairs.push_back({matrix_unit(0, S - 1, unit_fn(true)), matrix_unit(1 % S, 0, unit_fn(true)),
                   "block_units_random"});
  // function-orthogonal: same block chain, disjoint supports
  CoefFn left(P, Cplx(0, 0)), right(P, Cplx(0, 0));
  for (std::size_t p = 0; p < P; ++p)
    (p < P / 2 ? left : right)[p] = Cplx(1, 0);
  pairs.push_back({matrix_unit(0, 1 % S, left), matrix_unit(1 % S, 0, right), "split_support"});
  // diagonal functions with disjoint supports
  CompressedOperator da = compressed_zero(n, m), db = compressed_zero(n, m);
  for (std::size_t i = 0; i < S; ++i) {
    da.block(i, i) = left;
    db.block(i, i) = right;
  }
  pairs.push_back({da, db, "diagonal_split"});
  return pairs;
}

CotlarReport cotlar_bound_check(const SampledSystem& sys, const std::vector<BandOperator>& ops,
                                double eta, double delta, int base_n) {
  CotlarReport rep;
  rep.eta = eta;
  rep.delta = delta;
  rep.premise_ok = true;
  BandOperator sum;
  sum.rank = sys.rank();
  std::vector<BandOperator> adjoints;
  adjoints.reserve(ops.size());
  for (const auto& op : ops) {
    adjoints.push_back(band_adjoint(sys, op));
    double nrm = estimate_norm(sys, op, base_n);
    rep.max_norm = std::max(rep.max_norm, nrm);
    if (nrm > 1.0 + kBudgetSlack) rep.premise_ok = false;
    for (const auto& [v, a] : op.terms) band_accumulate(sum, v, a);
  }
  for (std::size_t i = 0; i < ops.size(); ++i)
    for (std::size_t j = 0; j < ops.size(); ++j) {
      if (i == j) continue;
      double nrm = estimate_norm(sys, band_mul(sys, adjoints[i], ops[j]), base_n);
      rep.max_pair_norm = std::max(rep.max_pair_norm, nrm);
    }
  if (rep.max_pair_norm > eta + kBudgetSlack) rep.premise_ok = false;
  rep.sum_norm = ops.empty() ? 0 : estimate_norm(sys, sum, base_n);
  rep.conclusion_holds = rep.sum_norm <= delta + rep.max_norm + kBudgetSlack;
  return rep;
}

PipelineReport pipeline_defect(const SampledSystem& sys, const TowerFamily& family, int n, int N,
                               const std::vector<PipelineTestOp>& test_ops, double delta_floor) {
  const int m = sys.rank();
  const std::size_t P = sys.size();
  if (N < 1 || n < N) throw Error("bad_parameter", "need 1 <= N <= n");
  if (family.n != 2 * n)
    throw Error("index_mismatch", "tower family side must be twice the window parameter");

  PipelineReport rep;
  rep.n = n;
  rep.N = N;
  rep.m = m;
  rep.d = family.colors() - 1;
  rep.s = 0;

  JWindow win(n, m);
  const std::size_t S = win.size();
  const double jn = static_cast<double>(S);
  JWindow winN(N, m);
  const double jN = static_cast<double>(winN.size());
  const int d = rep.d;

  // family defect, square-root relations included
  ToleranceReport tol = verify_def_relations(sys, family);
  double eps3_sqrt = 0;
  {
    std::vector<Vec> box = enum_box(BoxKind::B, family.n, m);
    for (const Vec& v : box) {
      Perm back = sys.permutation(-v);
      for (const auto& color : family.values)
        for (std::size_t wi = 0; wi < box.size(); ++wi) {
          std::size_t ti = 0;
          {
            Vec t = v + box[wi];
            for (int i = 0; i < m; ++i) {
              std::int64_t x = t.c[i] % family.n;
              if (x < 0) x += family.n;
              ti = ti * static_cast<std::size_t>(family.n) + static_cast<std::size_t>(x);
            }
          }
          const auto& fw = color[wi];
          const auto& target = color[ti];
          for (std::size_t p = 0; p < P; ++p)
            eps3_sqrt = std::max(eps3_sqrt, std::abs(std::sqrt(to_double(fw[back[p]])) -
                                                     std::sqrt(to_double(target[p]))));
        }
    }
  }
  rep.eps = std::max({tol.eps1_d(), tol.eps2_d(), tol.eps3_d(),
                      std::sqrt(std::max(tol.eps2_d(), 0.0)), eps3_sqrt});

  // delta back-solved from the window constraints
  double ratio = std::pow(static_cast<double>(N) / static_cast<double>(n), m);
  rep.delta_floor = std::max(delta_floor, jN * ratio);
  rep.delta = std::max(3.0 * jn * jN * rep.eps, rep.delta_floor);
  const double delta = rep.delta;

  // exact tower data on the J window
  std::vector<Rat> tents(S);
  for (std::size_t i = 0; i < S; ++i) tents[i] = tent_m(n, win.element(i));
  std::vector<std::vector<std::size_t>> sp_index(1u << m, std::vector<std::size_t>(S));
  for (unsigned mask = 0; mask < (1u << m); ++mask)
    for (std::size_t i = 0; i < S; ++i)
      sp_index[mask][i] = win.index(shift_s(mask, n, win.element(i)));
  // fam_j[c][window index] -> exact function values
  std::vector<std::vector<const std::vector<Rat>*>> fam_j(family.values.size(),
                                                          std::vector<const std::vector<Rat>*>(S));
  for (std::size_t c = 0; c < family.values.size(); ++c)
    for (std::size_t i = 0; i < S; ++i)
      fam_j[c][i] = &family.values[c][family_box_index(family, m, win.element(i))];

  // tower-sum transport identity, exact
  Rat identity_dev(0);
  for (std::size_t c = 0; c < family.values.size(); ++c)
    for (std::size_t p = 0; p < P; ++p) {
      Rat lhs(0), rhs(0);
      for (std::size_t i = 0; i < S; ++i) {
        lhs += (*fam_j[c][i])[p];
        for (unsigned mask = 0; mask < (1u << m); ++mask)
          rhs += tents[i] * (*fam_j[c][sp_index[mask][i]])[p];
      }
      Rat dev = lhs - rhs;
      if (dev < Rat(0)) dev = -dev;
      identity_dev = std::max(identity_dev, dev);
    }
  rep.tower_sum_identity_exact = identity_dev == Rat(0);
  rep.family_checks.push_back(
      {"tower_sum_identity", to_double(identity_dev), 0.0, true, identity_dev == Rat(0)});

  // blockwise sigma vs its collapsed form, coefficient supremum per block
  {
    double star = 0;
    PermCache perms(sys);
    for (std::size_t c = 0; c < family.values.size(); ++c)
      for (unsigned mask = 0; mask < (1u << m); ++mask)
        for (std::size_t vi = 0; vi < S; ++vi) {
          std::vector<double> fv_sqrt(P), fv(P);
          const auto& fvr = *fam_j[c][sp_index[mask][vi]];
          for (std::size_t p = 0; p < P; ++p) {
            fv[p] = to_double(fvr[p]);
            fv_sqrt[p] = std::sqrt(fv[p]);
          }
          for (std::size_t wi = 0; wi < S; ++wi) {
            Vec shift = win.element(vi) - win.element(wi);
            const Perm& back = perms.of(-shift);
            const auto& fwr = *fam_j[c][sp_index[mask][wi]];
            for (std::size_t p = 0; p < P; ++p) {
              double lhs = fv_sqrt[p] * std::sqrt(to_double(fwr[back[p]]));
              star = std::max(star, std::abs(lhs - fv[p]));
            }
          }
        }
    rep.family_checks.push_back(
        {"star_defect", star, 3.0 * rep.eps + kBudgetSlack, true, star <= 3.0 * rep.eps + kBudgetSlack});
  }

  const double s1 = 1.0; // s + 1 with the identity inner approximation
  for (const auto& top : test_ops) {
    PipelinePerOp po;
    po.name = top.name;
    po.v = top.v;
    if (!winN.contains(top.v))
      throw Error("out_of_window", "test op '" + top.name + "' outside the band window");
    if (sup_norm(top.a) > 1.0 + 1e-12)
      throw Error("bad_parameter", "test op '" + top.name + "' is not a contraction");

    BandOperator x = band_term(m, top.v, top.a);
    CompressedOperator cx = compress_psi(sys, x, n);
    DiagonalWeight dw = diagonal_weight(n, m);

    CompressedOperator cmu = cx;
    CompressedOperator cdpsi = cx;
    for (std::size_t i = 0; i < S; ++i)
      for (std::size_t j = 0; j < S; ++j) {
        CoefFn& bm = cmu.block(i, j);
        if (bm.empty()) continue;
        double s_mu = dw.sqrt_values[i] * dw.sqrt_values[j];
        double s_d = to_double(dw.values[i]);
        CoefFn& bd = cdpsi.block(i, j);
        for (std::size_t p = 0; p < P; ++p) {
          bd[p] *= s_d;
          bm[p] *= s_mu;
        }
      }

    auto sigma_sum = [&](const CompressedOperator& c) {
      BandOperator y;
      y.rank = m;
      for (int color = 0; color <= d; ++color)
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
          BandOperator part = sigma_apply(sys, family, color, mask, c);
          for (const auto& [vv, fn] : part.terms) band_accumulate(y, vv, fn);
        }
      return y;
    };
    BandOperator y = sigma_sum(cmu);
    BandOperator y2 = sigma_sum(cdpsi);

    // commutator of the tent square roots with the compression
    CommutatorCheck comm = commutator_sqrtD(sys, top.a, top.v, n);
    po.steps.push_back({"commutator_sqrtD", comm.estimate, comm.sqrt_bound + kBudgetSlack, true,
                        comm.estimate <= comm.sqrt_bound + kBudgetSlack});

    // mu vs D Psi at the compressed level, exact blockwise norm
    {
      double measured = compressed_norm(compressed_sub(cmu, cdpsi));
      po.steps.push_back({"mu_vs_dpsi", measured, comm.mu_bound + kBudgetSlack, true,
                          measured <= comm.mu_bound + kBudgetSlack});
      // informational: the chain's target for this step
      po.steps.push_back({"mu_vs_dpsi_chain_budget", measured, delta / jn, false,
                          measured <= delta / jn + kBudgetSlack});
    }

    // sigma applied to the mu-vs-DPsi gap, first link of the chain
    {
      double measured = estimate_norm(sys, band_sub(y, y2), n);
      double budget = std::ldexp(1.0, m) * (d + 1) * s1 * delta / jN;
      po.steps.push_back({"sigma_mu_gap", measured, budget + kBudgetSlack, true,
                          measured <= budget + kBudgetSlack});
    }

    // collapsed target: (sum_l,p,w tent(w) f_{s_p(w)}) a u_v
    {
      std::vector<Rat> gsum(P, Rat(0));
      for (std::size_t wi = 0; wi < S; ++wi) {
        if (!win.contains(win.element(wi) - top.v)) continue;
        for (std::size_t c = 0; c < family.values.size(); ++c)
          for (unsigned mask = 0; mask < (1u << m); ++mask) {
            const auto& fn = *fam_j[c][sp_index[mask][wi]];
            for (std::size_t p = 0; p < P; ++p)
              if (fn[p] != Rat(0)) gsum[p] += tents[wi] * fn[p];
          }
      }
      CoefFn c3(P);
      for (std::size_t p = 0; p < P; ++p) c3[p] = to_double(gsum[p]) * top.a[p];
      BandOperator target3 = band_term(m, top.v, c3);

      double star_measured = estimate_norm(sys, band_sub(y2, target3), n);
      double star_budget = std::ldexp(1.0, m) * jn * (d + 1) * s1 * 3.0 * rep.eps;
      po.steps.push_back({"star_collapse", star_measured, star_budget + kBudgetSlack, true,
                          star_measured <= star_budget + kBudgetSlack});

      // identity inner approximation contributes nothing
      double inner_budget = std::ldexp(1.0, m) * (d + 1) * delta / jN;
      po.steps.push_back({"inner_approx", 0.0, inner_budget + kBudgetSlack, true, true});

      // tail of the tent sum outside the shifted window, exact sup
      Rat tail_max(0);
      for (std::size_t c = 0; c < family.values.size(); ++c) {
        std::vector<Rat> tail(P, Rat(0));
        for (std::size_t wi = 0; wi < S; ++wi) {
          if (win.contains(win.element(wi) - top.v)) continue;
          for (unsigned mask = 0; mask < (1u << m); ++mask) {
            const auto& fn = *fam_j[c][sp_index[mask][wi]];
            for (std::size_t p = 0; p < P; ++p)
              if (fn[p] != Rat(0)) tail[p] += tents[wi] * fn[p];
          }
        }
        for (std::size_t p = 0; p < P; ++p) tail_max = std::max(tail_max, tail[p]);
      }
      double tail_budget = std::ldexp(1.0, m) * (delta / jN + ratio);
      po.steps.push_back({"tail_sum", to_double(tail_max), tail_budget + kBudgetSlack, true,
                          to_double(tail_max) <= tail_budget + kBudgetSlack});

      // distance of the collapsed coefficient from 1, exact sup
      Rat lower_max(0);
      for (std::size_t p = 0; p < P; ++p) {
        Rat dev = Rat(1) - gsum[p];
        if (dev < Rat(0)) dev = -dev;
        lower_max = std::max(lower_max, dev);
      }
      double lower_budget = std::ldexp(1.0, m + 2) * (d + 1) * delta / jN;
      po.steps.push_back({"tower_sum_lower", to_double(lower_max), lower_budget + kBudgetSlack, true,
                          to_double(lower_max) <= lower_budget + kBudgetSlack});
    }

    po.total_defect = estimate_norm(sys, band_sub(x, y), n);
    po.per_term_budget = std::ldexp(1.0, m + 3) * (d + 1) * s1 * delta / jN;
    po.budget = std::ldexp(1.0, m + 4) * (d + 1) * s1 * delta;
    po.pass = po.total_defect <= po.budget + kBudgetSlack;
    for (const auto& st : po.steps)
      if (st.gating && !st.pass) po.pass = false;
    rep.per_op.push_back(std::move(po));
  }

  rep.pass = true;
  for (const auto& fc : rep.family_checks)
    if (fc.gating && !fc.pass) rep.pass = false;
  for (const auto& po : rep.per_op)
    if (!po.pass) rep.pass = false;
  return rep;
}

} // namespace rokdim
