#pragma once

#include <dmdkit/dmd.hpp>

#include <Eigen/Cholesky>

#include <optional>

namespace dmdkit {

// Linear inverse modeling in EOF coordinates. EOFs are the left singular
// vectors of X alone; expectations are uniform averages over the m columns.

struct LimOptions {
  RankPolicy rank = RankPolicy::automatic();
  /// Skip the centering check. The algebra still holds; the statistical reading does not.
  bool force = false;
  /// Column-mean norm above this fraction of ||X||_F counts as "not centered".
  double mean_tol = 1e-10;
};

struct EofCoefficients {
  ReducedSvd svd;  // eofs = svd.u
  Matrix x_hat;    // U^* X
  Matrix y_hat;    // U^* Y

  const Matrix& eofs() const { return svd.u; }
};

struct LimModel {
  EofCoefficients coeffs;
  Matrix lambda_cov;  // E(x^ x^*) = X^ X^* / m
  Matrix lag_cov;     // E(y^ x^*) = Y^ X^* / m
  Matrix green;       // G(tau) = lag_cov * lambda_cov^{-1}
  std::optional<double> tau;
};

inline EofCoefficients eof_coefficients(const SnapshotPairs& pairs, const LimOptions& opts = {}) {
  if (!opts.force) {
    const double mean_norm = pairs.x.rowwise().mean().norm();
    detail::require(mean_norm <= opts.mean_tol * pairs.x.norm(), ErrorCategory::precondition,
                    "eof_coefficients: X is not mean-subtracted (column-mean norm " +
                        std::to_string(mean_norm) +
                        "); subtract the X mean first or pass force");
  }
  EofCoefficients out;
  out.svd = reduced_svd(pairs.x, opts.rank);
  out.x_hat = out.svd.u.adjoint() * pairs.x;
  out.y_hat = out.svd.u.adjoint() * pairs.y;
  return out;
}

/// G(tau) = E(y^ x^*) Lambda^{-1}, with Lambda factored by Cholesky.
inline LimModel green_function(EofCoefficients coeffs, std::optional<double> tau = std::nullopt) {
  const double m = static_cast<double>(coeffs.x_hat.cols());
  LimModel model;
  model.lambda_cov = coeffs.x_hat * coeffs.x_hat.adjoint() / m;
  model.lag_cov = coeffs.y_hat * coeffs.x_hat.adjoint() / m;
  Eigen::LLT<Matrix> llt(model.lambda_cov);
  detail::require(llt.info() == Eigen::Success, ErrorCategory::numerical,
                  "green_function: EOF covariance is not positive definite");
  // G Lambda = C  <=>  Lambda G^* = C^*  (Lambda Hermitian)
  model.green = llt.solve(model.lag_cov.adjoint()).adjoint();
  model.coeffs = std::move(coeffs);
  model.tau = tau;
  return model;
}

inline LimModel fit_lim(const SnapshotPairs& pairs, const LimOptions& opts = {}) {
  return green_function(eof_coefficients(pairs, opts), pairs.dt);
}

struct LimDmdReport {
  Matrix green;
  Matrix a_tilde;
  double max_abs_diff = 0.0;
  double a_tilde_norm = 0.0;
  bool equivalent = false;  // max_abs_diff <= tol * ||A~||_F
};

/// Computes G(tau) through the covariance route and A~ through the DMD route and compares them.
inline LimDmdReport lim_dmd_equivalence(const SnapshotPairs& pairs, const LimOptions& opts = {},
                                        double tol = 1e-10) {
  const LimModel model = fit_lim(pairs, opts);
  const ReducedOperator op = reduced_operator(pairs, opts.rank);
  LimDmdReport rep;
  rep.green = model.green;
  rep.a_tilde = op.a_tilde;
  rep.a_tilde_norm = op.a_tilde.norm();
  rep.max_abs_diff = (model.green - op.a_tilde).cwiseAbs().maxCoeff();
  rep.equivalent = rep.max_abs_diff <= tol * rep.a_tilde_norm;
  return rep;
}

/// Most probable EOF state one lag later: G x^(t).
inline Vector most_probable_state(const Matrix& green, const Vector& x_hat) {
  detail::require(green.cols() == x_hat.size(), ErrorCategory::dimension,
                  "most_probable_state: G and state differ in dimension");
  return green * x_hat;
}

}  // namespace dmdkit
