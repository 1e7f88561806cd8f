#pragma once

#include <dmdkit/dmd.hpp>

#include <cmath>
#include <limits>

namespace dmdkit {

namespace detail {

// Multiplies every representation of mode j by alpha[j]; amplitudes move inversely
// so that d_j phi_j is unchanged.
inline void rescale_modes(DmdDecomposition& dec, const Vector& alpha) {
  for (Eigen::Index j = 0; j < dec.size(); ++j) {
    dec.exact_modes.col(j) *= alpha(j);
    dec.projected_modes.col(j) *= alpha(j);
    dec.reduced_vectors.col(j) *= alpha(j);
    if (dec.amplitudes) (*dec.amplitudes)(j) /= alpha(j);
  }
}

}  // namespace detail

/// Scales each mode so its reduced vector, hence its projected mode, has unit norm.
inline DmdDecomposition scale_unit_norm(DmdDecomposition dec) {
  Vector alpha(dec.size());
  for (Eigen::Index j = 0; j < dec.size(); ++j) {
    const double n = dec.reduced_vectors.col(j).norm();
    alpha(j) = n > 0.0 ? 1.0 / n : 1.0;
  }
  detail::rescale_modes(dec, alpha);
  dec.scaling = ScalingKind::unit_norm;
  return dec;
}

/**
 * Unit-norm modes with adjoint modes rescaled so that psi_k^* phi_k = 1.
 * Across distinct eigenvalues psi_j^* phi_k vanishes, so the two sets are
 * biorthogonal. Refuses when adjoint modes are missing or two eigenvalues
 * coincide within 1e-9 * max|lambda|.
 */
inline DmdDecomposition scale_biorthogonal(DmdDecomposition dec) {
  detail::require(dec.adjoint_modes.has_value(), ErrorCategory::precondition,
                  "scale_biorthogonal: decomposition has no adjoint modes "
                  "(set compute_adjoint)");
  double max_mag = 0.0;
  for (Eigen::Index j = 0; j < dec.size(); ++j)
    max_mag = std::max(max_mag, std::abs(dec.eigenvalues(j)));
  for (Eigen::Index j = 0; j < dec.size(); ++j)
    for (Eigen::Index k = j + 1; k < dec.size(); ++k)
      detail::require(std::abs(dec.eigenvalues(j) - dec.eigenvalues(k)) > 1e-9 * max_mag,
                      ErrorCategory::precondition,
                      "scale_biorthogonal: repeated eigenvalues " + std::to_string(j) +
                          " and " + std::to_string(k) + ", biorthogonality is undefined");
  dec = scale_unit_norm(std::move(dec));
  auto& psi = *dec.adjoint_modes;
  for (Eigen::Index k = 0; k < dec.size(); ++k) {
    // psi^* phi^ = z^* U^* U w = z^* w, and U^* phi = w, so one factor serves both mode sets.
    const Complex s = psi.col(k).dot(dec.projected_modes.col(k));
    detail::require(std::abs(s) > std::numeric_limits<double>::epsilon(),
                    ErrorCategory::numerical,
                    "scale_biorthogonal: adjoint mode orthogonal to its own mode");
    psi.col(k) /= std::conj(s);
  }
  dec.scaling = ScalingKind::biorthogonal;
  return dec;
}

enum class AmplitudeMethod { qr, gram };

/// first_y solves Phi Lambda d = y_0; first_x solves Phi d = x_0.
enum class AmplitudeTarget { first_y, first_x };

/**
 * Mode amplitudes for sequential data.
 *
 * qr factors Phi Lambda (or Phi) directly. gram never forms Phi: with
 * Phi Lambda = B W it solves
 *   (W^* Sigma^{-1} V^* Y^* Y V Sigma^{-1} W) d = W^* Sigma^{-1} V^* Y^* y_0,
 * which squares the condition number of Phi. Inconsistent data get the
 * least-squares solution; the residual is stored either way.
 */
inline DmdDecomposition scale_amplitudes(DmdDecomposition dec, const SnapshotPairs& pairs,
                                         AmplitudeMethod method,
                                         AmplitudeTarget target = AmplitudeTarget::first_y) {
  detail::require(pairs.provenance == Provenance::sequential ||
                      pairs.provenance == Provenance::delay_embedded,
                  ErrorCategory::precondition,
                  std::string("scale_amplitudes: needs sequential pairs, got ") +
                      to_string(pairs.provenance));
  const auto& svd = dec.op.svd_of_x;
  detail::require(pairs.y.rows() == dec.exact_modes.rows() && pairs.y.cols() == svd.v.rows(),
                  ErrorCategory::dimension,
                  "scale_amplitudes: pairs do not match the decomposition");
  for (Eigen::Index j = 0; j < dec.size(); ++j)
    detail::require(std::abs(dec.eigenvalues(j)) > dec.zero_tol, ErrorCategory::precondition,
                    "scale_amplitudes: zero-eigenvalue modes cannot carry amplitudes");
  const Eigen::Index r = dec.size();
  const Vector lambda = dec.eigenvalues;
  const Vector rhs_vec = target == AmplitudeTarget::first_y ? Vector(pairs.y.col(0))
                                                            : Vector(pairs.x.col(0));
  Vector d(r);
  if (r > 0) {
    if (method == AmplitudeMethod::qr) {
      Matrix lhs = dec.exact_modes;
      if (target == AmplitudeTarget::first_y) lhs = lhs * lambda.asDiagonal();
      d = Eigen::ColPivHouseholderQR<Matrix>(lhs).solve(rhs_vec);
    } else {
      const Matrix s_vh = svd.sigma.cwiseInverse().asDiagonal() * svd.v.adjoint();  // r x m
      const Matrix y_gram = pairs.y.adjoint() * pairs.y;                           // m x m
      const Matrix& w = dec.reduced_vectors;
      const Matrix normal = w.adjoint() * s_vh * y_gram * s_vh.adjoint() * w;
      const Vector rhs = w.adjoint() * s_vh * (pairs.y.adjoint() * rhs_vec);
      d = Eigen::PartialPivLU<Matrix>(normal).solve(rhs);
      // B W d' = x_0  =>  Phi (Lambda d') = x_0
      if (target == AmplitudeTarget::first_x) d = lambda.cwiseProduct(d);
    }
  }
  const Vector fitted = target == AmplitudeTarget::first_y
                            ? Vector(dec.exact_modes * lambda.cwiseProduct(d))
                            : Vector(dec.exact_modes * d);
  dec.amplitude_residual = (fitted - rhs_vec).norm();
  dec.amplitudes = std::move(d);
  dec.scaling =
      method == AmplitudeMethod::qr ? ScalingKind::amplitude_qr : ScalingKind::amplitude_gram;
  return dec;
}

}  // namespace dmdkit
