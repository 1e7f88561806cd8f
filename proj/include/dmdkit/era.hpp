#pragma once

#include <dmdkit/dmd.hpp>
#include <dmdkit/linalg.hpp>

#include <optional>
#include <vector>

namespace dmdkit {

/// Markov parameters C A^{kP} B and their one-step shifts C A^{kP+1} B, k = 0..m-1.
struct MarkovSequence {
  std::vector<Matrix> params;
  std::vector<Matrix> shifted;
  Eigen::Index p = 1;  // inputs
  Eigen::Index q = 1;  // outputs
  Eigen::Index stride = 1;

  Eigen::Index size() const { return static_cast<Eigen::Index>(params.size()); }

  void validate() const {
    detail::require(!params.empty() && params.size() == shifted.size(),
                    ErrorCategory::dimension,
                    "MarkovSequence: params and shifted must be nonempty and equally long");
    for (std::size_t k = 0; k < params.size(); ++k)
      detail::require(params[k].rows() == q && params[k].cols() == p &&
                          shifted[k].rows() == q && shifted[k].cols() == p,
                      ErrorCategory::dimension, "MarkovSequence: block shape is not q x p");
  }
};

/// Samples the impulse response of (A, B, C): m parameters at stride P.
template <class DA, class DB, class DC>
MarkovSequence impulse_markov(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                              const Eigen::MatrixBase<DC>& c, Eigen::Index m,
                              Eigen::Index stride = 1) {
  detail::require(a.rows() == a.cols() && b.rows() == a.rows() && c.cols() == a.rows(),
                  ErrorCategory::dimension, "impulse_markov: incompatible A, B, C");
  detail::require(m >= 1 && stride >= 1, ErrorCategory::precondition,
                  "impulse_markov: need m >= 1 and stride >= 1");
  const Matrix am = detail::to_complex(a), bm = detail::to_complex(b), cm = detail::to_complex(c);
  MarkovSequence seq;
  seq.p = bm.cols();
  seq.q = cm.rows();
  seq.stride = stride;
  Matrix state = bm;  // A^{kP} B
  for (Eigen::Index k = 0; k < m; ++k) {
    seq.params.push_back(cm * state);
    seq.shifted.push_back(cm * am * state);
    for (Eigen::Index s = 0; s < stride; ++s) state = am * state;
  }
  return seq;
}

/**
 * Markov sequence from a fine-grained impulse response h_0, h_1, ... (one
 * q x p block per step): params[k] = h_{kP}, shifted[k] = h_{kP+1}.
 */
inline MarkovSequence markov_from_response(const std::vector<Matrix>& response,
                                           Eigen::Index stride = 1) {
  detail::require(stride >= 1, ErrorCategory::precondition,
                  "markov_from_response: stride must be positive");
  detail::require(response.size() >= 2, ErrorCategory::precondition,
                  "markov_from_response: need at least two response samples");
  MarkovSequence seq;
  seq.q = response.front().rows();
  seq.p = response.front().cols();
  seq.stride = stride;
  for (std::size_t k = 0; k * stride + 1 < response.size(); ++k) {
    seq.params.push_back(response[k * stride]);
    seq.shifted.push_back(response[k * stride + 1]);
  }
  seq.validate();
  return seq;
}

struct HankelPair {
  Matrix h;
  Matrix h_shifted;
  Eigen::Index m_c = 0;
  Eigen::Index m_o = 0;
};

/// Balanced split used when the caller does not choose m_o.
inline Eigen::Index default_m_o(Eigen::Index m) { return (m - 1) / 2; }

/// Block (i, j) of H is params[i + j] and of H' is shifted[i + j]; requires m_c + m_o = m - 1.
inline HankelPair build_hankel(const MarkovSequence& seq, Eigen::Index m_c, Eigen::Index m_o) {
  seq.validate();
  detail::require(m_c >= 0 && m_o >= 0, ErrorCategory::precondition,
                  "build_hankel: m_c and m_o must be nonnegative");
  detail::require(m_c + m_o == seq.size() - 1, ErrorCategory::precondition,
                  "build_hankel: m_c + m_o must equal m - 1 = " + std::to_string(seq.size() - 1));
  const Eigen::Index p = seq.p, q = seq.q;
  HankelPair out;
  out.m_c = m_c;
  out.m_o = m_o;
  out.h.resize(q * (m_o + 1), p * (m_c + 1));
  out.h_shifted.resize(out.h.rows(), out.h.cols());
  for (Eigen::Index i = 0; i <= m_o; ++i)
    for (Eigen::Index j = 0; j <= m_c; ++j) {
      out.h.block(i * q, j * p, q, p) = seq.params[static_cast<std::size_t>(i + j)];
      out.h_shifted.block(i * q, j * p, q, p) = seq.shifted[static_cast<std::size_t>(i + j)];
    }
  return out;
}

inline HankelPair build_hankel(const MarkovSequence& seq) {
  const Eigen::Index m_o = default_m_o(seq.size());
  return build_hankel(seq, seq.size() - 1 - m_o, m_o);
}

struct EraRealization {
  Matrix a_r, b_r, c_r, d_r;
  Matrix hankel, hankel_shifted;
  ReducedSvd svd_of_h;  // full numerical rank; a_r uses its leading `order` triplets
  Eigen::Index order = 0;
  Eigen::Index m_c = 0, m_o = 0;

  /// C_r A_r^k B_r
  Matrix markov(Eigen::Index k) const {
    Matrix state = b_r;
    for (Eigen::Index s = 0; s < k; ++s) state = a_r * state;
    return c_r * state;
  }
};

/**
 * Order-r ERA model:
 *   A_r = S^{-1/2} U_r^* H' V_r S^{-1/2},
 *   B_r = first p columns of S^{1/2} V_r^*,
 *   C_r = first q rows of U_r S^{1/2},
 *   D_r = D (zero when not supplied).
 * order = nullopt means the full numerical rank of H.
 */
inline EraRealization era_realize(const HankelPair& hp, std::optional<Eigen::Index> order,
                                  Eigen::Index p, Eigen::Index q,
                                  std::optional<Matrix> feedthrough = std::nullopt,
                                  const RankPolicy& policy = RankPolicy::automatic()) {
  detail::require(hp.h.rows() == hp.h_shifted.rows() && hp.h.cols() == hp.h_shifted.cols(),
                  ErrorCategory::dimension, "era_realize: H and H' differ in shape");
  detail::require(p >= 1 && q >= 1 && p <= hp.h.cols() && q <= hp.h.rows(),
                  ErrorCategory::dimension, "era_realize: p or q inconsistent with H");
  EraRealization out;
  out.hankel = hp.h;
  out.hankel_shifted = hp.h_shifted;
  out.m_c = hp.m_c;
  out.m_o = hp.m_o;
  out.svd_of_h = reduced_svd(hp.h, policy);
  const Eigen::Index r = order.value_or(out.svd_of_h.rank);
  detail::require(r >= 1 && r <= out.svd_of_h.rank, ErrorCategory::precondition,
                  "era_realize: order " + std::to_string(r) + " exceeds rank(H) = " +
                      std::to_string(out.svd_of_h.rank));
  out.order = r;
  const Matrix ur = out.svd_of_h.u.leftCols(r);
  const Matrix vr = out.svd_of_h.v.leftCols(r);
  const RealVector s_half = out.svd_of_h.sigma.head(r).cwiseSqrt();
  const RealVector s_mhalf = s_half.cwiseInverse();
  out.a_r = s_mhalf.asDiagonal() * (ur.adjoint() * hp.h_shifted * vr) * s_mhalf.asDiagonal();
  out.b_r = (s_half.asDiagonal() * vr.adjoint()).leftCols(p);
  out.c_r = (ur * s_half.asDiagonal()).topRows(q);
  if (feedthrough) {
    detail::require(feedthrough->rows() == q && feedthrough->cols() == p,
                    ErrorCategory::dimension, "era_realize: D must be q x p");
    out.d_r = *feedthrough;
  } else {
    out.d_r = Matrix::Zero(q, p);
  }
  return out;
}

struct EraDmdReport {
  Vector era_eigs;
  Vector dmd_eigs;
  double max_mismatch = 0.0;         // nearest-match |lambda_era - lambda_dmd|
  double vector_map_residual = 0.0;  // max ||A~ w - lambda w|| / (||A~||_F ||w||), w = S^{1/2} v
  Eigen::Index rank = 0;
};

/**
 * Compares the full-rank ERA matrix with the DMD operator of (X = H, Y = H').
 * The two are similar through S^{1/2}: A_r = S^{-1/2} A~ S^{1/2}.
 */
inline EraDmdReport era_dmd_similarity(const HankelPair& hp,
                                       const RankPolicy& policy = RankPolicy::automatic()) {
  const SnapshotPairs pairs = make_pairs(hp.h, hp.h_shifted);
  const ReducedOperator op = reduced_operator(pairs, policy);
  const EraRealization era = era_realize(hp, std::nullopt, 1, 1, std::nullopt, policy);
  const EigenPairs dmd_eig = eig_dense(op.a_tilde);
  const EigenPairs era_eig = eig_dense(era.a_r);
  EraDmdReport rep;
  rep.rank = op.svd_of_x.rank;
  rep.era_eigs = era_eig.values;
  rep.dmd_eigs = dmd_eig.values;
  rep.max_mismatch = match_spectra(rep.era_eigs, rep.dmd_eigs).max_abs_error;
  const RealVector s_half = op.svd_of_x.sigma.cwiseSqrt();
  const double anorm = op.a_tilde.norm();
  for (Eigen::Index j = 0; j < era_eig.values.size(); ++j) {
    const Vector w = s_half.asDiagonal() * era_eig.vectors.col(j);
    const double res =
        (op.a_tilde * w - era_eig.values(j) * w).norm() / (anorm * w.norm());
    rep.vector_map_residual = std::max(rep.vector_map_residual, res);
  }
  return rep;
}

}  // namespace dmdkit
