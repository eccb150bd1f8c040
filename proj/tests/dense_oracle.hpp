// Test-only dense computations used as independent oracles for the
// matrix-free operator paths. Everything here goes through the regular
// representation entry by entry; none of it shares code with the library's
// windowed application or Krylov estimator.
#pragma once

#include <Eigen/Dense>

#include "rokdim/crossed.hpp"

namespace rokdim::testing {

/// Dense matrix of the operator compressed to the window, built from the
/// regular-representation formula: entry ((w,p),(w',p')) is
/// [p == p'] sum_{v = w - w'} a_v(alpha^w p).
inline Eigen::MatrixXcd dense_matrix(const SampledSystem& sys, const BandOperator& op,
                                     const JWindow& win) {
  const std::size_t P = sys.size();
  const Eigen::Index D = static_cast<Eigen::Index>(win.size() * P);
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(D, D);
  for (std::size_t wi = 0; wi < win.size(); ++wi) {
    Vec w = win.element(wi);
    for (const auto& [v, a] : op.terms) {
      Vec src = w - v;
      if (!win.contains(src)) continue;
      std::size_t si = win.index(src);
      for (std::size_t p = 0; p < P; ++p)
        mat(static_cast<Eigen::Index>(wi * P + p), static_cast<Eigen::Index>(si * P + p)) +=
            a[sys.act(w, static_cast<std::uint32_t>(p))];
    }
  }
  return mat;
}

/// ||T Q_K|| with the same window policy as estimate_norm, via dense SVD.
inline double dense_compressed_norm(const SampledSystem& sys, const BandOperator& op, int base_n) {
  if (op.terms.empty()) return 0;
  const int bw = static_cast<int>(op.bandwidth());
  JWindow pad(base_n + 3 * bw + 1, sys.rank());
  JWindow support(base_n + bw, sys.rank());
  Eigen::MatrixXcd mat = dense_matrix(sys, op, pad);
  const std::size_t P = sys.size();
  for (std::size_t wi = 0; wi < pad.size(); ++wi) {
    if (support.contains(pad.element(wi))) continue;
    for (std::size_t p = 0; p < P; ++p)
      mat.col(static_cast<Eigen::Index>(wi * P + p)).setZero();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat);
  return svd.singularValues()(0);
}

} // namespace rokdim::testing
