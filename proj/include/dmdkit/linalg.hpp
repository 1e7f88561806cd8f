#pragma once

#include <dmdkit/types.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace dmdkit {

/**
 * How the numerical rank of a matrix is decided from its singular values.
 *
 * automatic keeps sigma_i > max(rows, cols) * eps * sigma_1. relative keeps
 * sigma_i > value * sigma_1 and absolute keeps sigma_i > value.
 *
 * With method_of_snapshots set, the SVD is taken from the eigendecomposition
 * of the Gram matrix X^* X. That squares the conditioning, so eigenvalues of
 * the Gram matrix are additionally cut at gram_tol * mu_1 (default
 * max(rows, cols) * eps).
 */
struct RankPolicy {
  enum class Kind { automatic, absolute, relative };

  Kind kind = Kind::automatic;
  double value = 0.0;
  bool method_of_snapshots = false;
  std::optional<double> gram_tol;

  static RankPolicy automatic() { return {}; }
  static RankPolicy absolute(double tol) { return {Kind::absolute, tol, false, std::nullopt}; }
  static RankPolicy relative(double tol) { return {Kind::relative, tol, false, std::nullopt}; }

  RankPolicy with_snapshots(std::optional<double> tol = std::nullopt) const {
    RankPolicy p = *this;
    p.method_of_snapshots = true;
    p.gram_tol = tol;
    return p;
  }

  double threshold(double sigma1, Eigen::Index rows, Eigen::Index cols) const {
    switch (kind) {
      case Kind::absolute: return value;
      case Kind::relative: return value * sigma1;
      case Kind::automatic: break;
    }
    return static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon() * sigma1;
  }
};

/// Thin SVD truncated to numerical rank: x ~= u * diag(sigma) * v^*.
struct ReducedSvd {
  Matrix u;              // n x r, orthonormal columns
  RealVector sigma;      // r values, positive, nonincreasing
  Matrix v;              // m x r, orthonormal columns
  Eigen::Index rank = 0;
  double truncation_tol = 0.0;   // singular values at or below this were discarded
  double discarded_norm = 0.0;   // sqrt of the sum of squared discarded singular values

  Eigen::Index rows() const { return u.rows(); }
  Eigen::Index cols() const { return v.rows(); }
};

struct EigenPairs {
  Vector values;
  Matrix vectors;                     // unit 2-norm columns, paired with values
  std::optional<Matrix> left_vectors; // z_j with z_j^* M = lambda_j z_j^*, unit norm
};

namespace detail {

inline ReducedSvd truncate_svd(const Matrix& u_full, const RealVector& s_full,
                               const Matrix& v_full, const RankPolicy& policy,
                               Eigen::Index rows, Eigen::Index cols,
                               Eigen::Index max_rank) {
  const double sigma1 = s_full.size() > 0 ? s_full(0) : 0.0;
  require(sigma1 > 0.0, ErrorCategory::rank_zero, "reduced_svd: matrix is zero");
  const double thr = policy.threshold(sigma1, rows, cols);
  Eigen::Index r = 0;
  while (r < std::min<Eigen::Index>(s_full.size(), max_rank) && s_full(r) > thr) ++r;
  require(r > 0, ErrorCategory::rank_zero,
          "reduced_svd: no singular value above the rank threshold");
  ReducedSvd out;
  out.u = u_full.leftCols(r);
  out.sigma = s_full.head(r);
  out.v = v_full.leftCols(r);
  out.rank = r;
  out.truncation_tol = thr;
  out.discarded_norm = s_full.tail(s_full.size() - r).norm();
  return out;
}

inline ReducedSvd svd_direct(const Matrix& x, const RankPolicy& policy) {
  if (is_real(x)) {
    const Eigen::MatrixXd xr = x.real();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(xr, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return truncate_svd(svd.matrixU().cast<Complex>(), svd.singularValues(),
                        svd.matrixV().cast<Complex>(), policy, x.rows(), x.cols(),
                        svd.singularValues().size());
  }
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return truncate_svd(svd.matrixU(), svd.singularValues(), svd.matrixV(), policy,
                      x.rows(), x.cols(), svd.singularValues().size());
}

// Method of snapshots: X^* X = V Sigma^2 V^*, U = X V Sigma^{-1}.
inline ReducedSvd svd_snapshots(const Matrix& x, const RankPolicy& policy) {
  const Matrix gram = x.adjoint() * x;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  require(es.info() == Eigen::Success, ErrorCategory::numerical,
          "reduced_svd: Gram eigensolver failed");
  const Eigen::Index m = gram.rows();
  RealVector mu(m);
  Matrix v(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {  // ascending -> descending
    mu(i) = std::max(0.0, es.eigenvalues()(m - 1 - i));
    v.col(i) = es.eigenvectors().col(m - 1 - i);
  }
  const double gtol = policy.gram_tol.value_or(
      static_cast<double>(std::max(x.rows(), x.cols())) *
      std::numeric_limits<double>::epsilon());
  Eigen::Index keep = 0;
  while (keep < m && mu(keep) > gtol * mu(0)) ++keep;
  RealVector sigma = mu.cwiseSqrt();
  Matrix u = Matrix::Zero(x.rows(), m);
  for (Eigen::Index i = 0; i < keep; ++i) u.col(i) = x * v.col(i) / sigma(i);
  ReducedSvd out = truncate_svd(u, sigma, v, policy, x.rows(), x.cols(), keep);
  out.discarded_norm = sigma.tail(m - out.rank).norm();
  return out;
}

}  // namespace detail

/// Reduced SVD with a numerical-rank decision. Throws rank_zero on a zero matrix.
template <class Derived>
ReducedSvd reduced_svd(const Eigen::MatrixBase<Derived>& x_in,
                       const RankPolicy& policy = RankPolicy::automatic()) {
  const Matrix x = detail::to_complex(x_in);
  detail::require(x.rows() >= 1 && x.cols() >= 1, ErrorCategory::dimension,
                  "reduced_svd: empty matrix");
  detail::require_finite(x, "reduced_svd");
  return policy.method_of_snapshots ? detail::svd_snapshots(x, policy)
                                    : detail::svd_direct(x, policy);
}

/// Orthonormal basis for range(cols), one column per numerical rank.
template <class Derived>
Matrix orthonormal_basis(const Eigen::MatrixBase<Derived>& cols,
                         const RankPolicy& policy = RankPolicy::automatic()) {
  return reduced_svd(cols, policy).u;
}

/// Applies X^+ = V Sigma^{-1} U^* to rhs without forming X^+.
inline Matrix pseudoinverse_apply(const ReducedSvd& svd, const Matrix& rhs) {
  detail::require(rhs.rows() == svd.rows(), ErrorCategory::dimension,
                  "pseudoinverse_apply: rhs has " + std::to_string(rhs.rows()) +
                      " rows, expected " + std::to_string(svd.rows()));
  return svd.v * (svd.sigma.cwiseInverse().asDiagonal() * (svd.u.adjoint() * rhs));
}

namespace detail {

// Greedy matching of conjugated eigenvalues of M^* to eigenvalues of M,
// smallest distance first. Used when the right eigenvector matrix is singular.
inline Matrix left_vectors_by_adjoint(const Matrix& m, const Vector& values) {
  Eigen::ComplexEigenSolver<Matrix> es(m.adjoint(), true);
  require(es.info() == Eigen::Success, ErrorCategory::numerical,
          "eig_dense: adjoint eigensolver failed");
  const Eigen::Index r = values.size();
  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> cand;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j)
      cand.emplace_back(std::abs(values(i) - std::conj(es.eigenvalues()(j))), i, j);
  std::sort(cand.begin(), cand.end());
  std::vector<bool> used_i(r, false), used_j(r, false);
  Matrix z(r, r);
  for (const auto& [d, i, j] : cand) {
    if (used_i[i] || used_j[j]) continue;
    used_i[i] = used_j[j] = true;
    z.col(i) = es.eigenvectors().col(j).normalized();
  }
  return z;
}

}  // namespace detail

/**
 * All eigenvalues (with multiplicity) and unit-norm eigenvectors of a small
 * dense matrix. Real input uses the real Schur path so conjugate pairs come
 * out exactly conjugate.
 *
 * Every pair is checked against ||M w - lambda w|| <= eig_tol * ||M||_F * ||w||
 * and a numerical error is raised if the check fails. Order is not canonical.
 */
inline EigenPairs eig_dense(const Matrix& m, bool want_left = false, double eig_tol = 1e-9) {
  detail::require(m.rows() == m.cols() && m.rows() >= 1, ErrorCategory::dimension,
                  "eig_dense: matrix must be square and nonempty");
  detail::require_finite(m, "eig_dense");
  const Eigen::Index r = m.rows();
  EigenPairs out;
  if (detail::is_real(m)) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.real(), true);
    detail::require(es.info() == Eigen::Success, ErrorCategory::numerical,
                    "eig_dense: eigensolver did not converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<Matrix> es(m, true);
    detail::require(es.info() == Eigen::Success, ErrorCategory::numerical,
                    "eig_dense: eigensolver did not converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  for (Eigen::Index j = 0; j < r; ++j) out.vectors.col(j).normalize();

  const double mnorm = m.norm();
  for (Eigen::Index j = 0; j < r; ++j) {
    const double res = (m * out.vectors.col(j) - out.values(j) * out.vectors.col(j)).norm();
    detail::require(res <= eig_tol * std::max(mnorm, std::numeric_limits<double>::min()),
                    ErrorCategory::numerical, "eig_dense: residual contract violated");
  }

  if (want_left) {
    // Rows of W^{-1} are left eigenvectors paired index-wise with the values.
    Eigen::FullPivLU<Matrix> lu(out.vectors);
    Matrix z;
    bool ok = false;
    if (lu.isInvertible()) {
      z = lu.inverse().adjoint();
      for (Eigen::Index j = 0; j < r; ++j) z.col(j).normalize();
      ok = true;
      for (Eigen::Index j = 0; j < r && ok; ++j) {
        const double res = (z.col(j).adjoint() * m -
                            out.values(j) * z.col(j).adjoint()).norm();
        ok = res <= eig_tol * mnorm;
      }
    }
    if (!ok) z = detail::left_vectors_by_adjoint(m, out.values);
    for (Eigen::Index j = 0; j < r; ++j) {
      const double res =
          (z.col(j).adjoint() * m - out.values(j) * z.col(j).adjoint()).norm();
      detail::require(res <= eig_tol * std::max(mnorm, std::numeric_limits<double>::min()),
                      ErrorCategory::numerical,
                      "eig_dense: left residual contract violated");
    }
    out.left_vectors = std::move(z);
  }
  return out;
}

/// |a^* b| / (||a|| ||b||); 1 means the vectors are parallel up to a complex factor.
inline double collinearity(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

/// Nearest-neighbour multiset matching of two eigenvalue lists with uniqueness.
struct SpectrumMatch {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;          // |a - b| / |a|, a from the first list
  std::vector<Eigen::Index> partner;   // partner[i] indexes b, -1 when b ran out
};

inline SpectrumMatch match_spectra(const Vector& a, const Vector& b) {
  SpectrumMatch out;
  out.partner.assign(static_cast<std::size_t>(a.size()), -1);
  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> cand;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) cand.emplace_back(std::abs(a(i) - b(j)), i, j);
  std::sort(cand.begin(), cand.end());
  std::vector<bool> used_b(static_cast<std::size_t>(b.size()), false);
  for (const auto& [d, i, j] : cand) {
    if (out.partner[i] >= 0 || used_b[j]) continue;
    out.partner[i] = j;
    used_b[j] = true;
    out.max_abs_error = std::max(out.max_abs_error, d);
    const double mag = std::abs(a(i));
    out.max_rel_error =
        std::max(out.max_rel_error, mag > 0.0 ? d / mag : (d > 0.0 ? INFINITY : 0.0));
  }
  for (auto p : out.partner)
    if (p < 0) out.max_abs_error = out.max_rel_error = INFINITY;
  return out;
}

}  // namespace dmdkit
