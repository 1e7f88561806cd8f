#pragma once

#include <dmdkit/data_model.hpp>
#include <dmdkit/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace dmdkit {

/// A~ = U^* Y V Sigma^{-1} together with the factors it was built from.
struct ReducedOperator {
  Matrix a_tilde;      // r x r
  ReducedSvd svd_of_x;
  Matrix b;            // n x r, B = Y V Sigma^{-1}; A = Y X^+ = B U^*
};

enum class Algorithm { exact, projected, qr, sequential };
enum class ScalingKind { none, unit_norm, biorthogonal, amplitude_qr, amplitude_gram };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::exact: return "exact";
    case Algorithm::projected: return "projected";
    case Algorithm::qr: return "qr";
    case Algorithm::sequential: return "sequential";
  }
  return "unknown";
}

inline const char* to_string(ScalingKind s) {
  switch (s) {
    case ScalingKind::none: return "none";
    case ScalingKind::unit_norm: return "unit-norm";
    case ScalingKind::biorthogonal: return "biorthogonal";
    case ScalingKind::amplitude_qr: return "amplitude-qr";
    case ScalingKind::amplitude_gram: return "amplitude-gram";
  }
  return "unknown";
}

struct DmdOptions {
  RankPolicy rank = RankPolicy::automatic();
  /// Eigenvalues with |lambda| <= zero_tol are dropped; default r * eps * ||A~||_F.
  std::optional<double> zero_tol;
  bool include_zero_modes = false;
  bool compute_adjoint = false;
  double eig_tol = 1e-9;
  /// Gram-Schmidt remainder ||p|| <= gs_tol * ||z_m|| is treated as zero (sequential variant).
  double gs_tol = 1e-10;
};

/**
 * Eigenvalues and modes of A = Y X^+, one column per eigenvalue.
 *
 * reduced_vectors holds w_j = U^* phi_j, so projected_modes = U w and, for
 * lambda != 0, B w = lambda phi. Every algorithm fills both mode sets; the
 * algorithm tag only decides which set is primary (see modes()).
 */
struct DmdDecomposition {
  Vector eigenvalues;
  Matrix exact_modes;
  Matrix projected_modes;
  std::optional<Matrix> adjoint_modes;
  std::optional<Vector> amplitudes;
  double amplitude_residual = 0.0;
  Matrix reduced_vectors;
  Algorithm algorithm = Algorithm::exact;
  ScalingKind scaling = ScalingKind::none;
  ReducedOperator op;
  double zero_tol = 0.0;
  std::vector<std::string> warnings;

  const Matrix& modes() const {
    return algorithm == Algorithm::projected ? projected_modes : exact_modes;
  }
  Eigen::Index size() const { return eigenvalues.size(); }
};

inline ReducedOperator reduced_operator(const SnapshotPairs& pairs,
                                        const RankPolicy& policy = RankPolicy::automatic()) {
  detail::require(pairs.x.rows() == pairs.y.rows() && pairs.x.cols() == pairs.y.cols(),
                  ErrorCategory::dimension, "reduced_operator: X and Y differ in shape");
  ReducedOperator op;
  op.svd_of_x = reduced_svd(pairs.x, policy);
  const auto& s = op.svd_of_x;
  op.b = pairs.y * s.v * s.sigma.cwiseInverse().asDiagonal();
  op.a_tilde = s.u.adjoint() * op.b;
  return op;
}

namespace detail {

inline double default_zero_tol(const Matrix& reduced) {
  return static_cast<double>(reduced.rows()) * std::numeric_limits<double>::epsilon() *
         reduced.norm();
}

inline Complex int_pow(Complex base, long k) {
  Complex acc(1.0, 0.0);
  while (k > 0) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

inline void warn_if_defective(const Matrix& eigvecs, std::vector<std::string>& warnings) {
  if (eigvecs.cols() == 0) return;
  Eigen::JacobiSVD<Matrix> svd(eigvecs);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-8 * s(0))
    warnings.emplace_back(
        "reduced operator is defective or nearly so: eigenvector matrix is "
        "numerically singular, mode expansions may be unreliable");
}

// Groups conjugate pairs, then sorts groups by descending primary-mode norm,
// descending |lambda|, ascending arg(lambda). Within a pair the lower arg comes first.
inline void canonical_order(DmdDecomposition& dec) {
  const Eigen::Index r = dec.size();
  const Matrix& modes = dec.modes();
  std::vector<double> norms(static_cast<std::size_t>(r));
  for (Eigen::Index j = 0; j < r; ++j) norms[j] = modes.col(j).norm();

  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<bool> used(static_cast<std::size_t>(r), false);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (used[i]) continue;
    used[i] = true;
    const Complex li = dec.eigenvalues(i);
    Eigen::Index partner = -1;
    if (li.imag() != 0.0) {
      double best = 1e-12 * std::max(std::abs(li), 1e-300);
      for (Eigen::Index j = i + 1; j < r; ++j) {
        if (used[j] || std::signbit(dec.eigenvalues(j).imag()) == std::signbit(li.imag()))
          continue;
        const double d = std::abs(dec.eigenvalues(j) - std::conj(li));
        if (d <= best) {
          best = d;
          partner = j;
        }
      }
    }
    if (partner >= 0) {
      used[partner] = true;
      if (std::arg(dec.eigenvalues(partner)) < std::arg(li))
        groups.push_back({partner, i});
      else
        groups.push_back({i, partner});
    } else {
      groups.push_back({i});
    }
  }

  struct Key { double norm, mag, arg; };
  auto key = [&](const std::vector<Eigen::Index>& g) {
    Key k{0.0, 0.0, std::arg(dec.eigenvalues(g.front()))};
    for (auto j : g) {
      k.norm = std::max(k.norm, norms[j]);
      k.mag = std::max(k.mag, std::abs(dec.eigenvalues(j)));
    }
    return k;
  };
  std::stable_sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
    const Key ka = key(a), kb = key(b);
    if (ka.norm != kb.norm) return ka.norm > kb.norm;
    if (ka.mag != kb.mag) return ka.mag > kb.mag;
    return ka.arg < kb.arg;
  });

  std::vector<Eigen::Index> order;
  for (const auto& g : groups) order.insert(order.end(), g.begin(), g.end());

  auto permute_cols = [&](Matrix& m) {
    if (m.cols() != r) return;
    Matrix out(m.rows(), r);
    for (Eigen::Index k = 0; k < r; ++k) out.col(k) = m.col(order[k]);
    m = std::move(out);
  };
  Vector vals(r);
  for (Eigen::Index k = 0; k < r; ++k) vals(k) = dec.eigenvalues(order[k]);
  dec.eigenvalues = std::move(vals);
  permute_cols(dec.exact_modes);
  permute_cols(dec.projected_modes);
  permute_cols(dec.reduced_vectors);
  if (dec.adjoint_modes) permute_cols(*dec.adjoint_modes);
  if (dec.amplitudes) {
    Vector a(r);
    for (Eigen::Index k = 0; k < r; ++k) a(k) = (*dec.amplitudes)(order[k]);
    dec.amplitudes = std::move(a);
  }
}

// Modes from eigenpairs of A~ (exact and projected). Zero-eigenvalue handling:
// phi = B w when that is nonzero, otherwise phi = U w.
inline DmdDecomposition decompose_reduced(ReducedOperator op, const DmdOptions& opts,
                                          Algorithm algorithm) {
  const EigenPairs eig = eig_dense(op.a_tilde, opts.compute_adjoint, opts.eig_tol);
  DmdDecomposition dec;
  dec.algorithm = algorithm;
  dec.zero_tol = opts.zero_tol.value_or(default_zero_tol(op.a_tilde));
  const Matrix& u = op.svd_of_x.u;
  const double bnorm = op.b.norm();

  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < eig.values.size(); ++j)
    if (std::abs(eig.values(j)) > dec.zero_tol || opts.include_zero_modes) keep.push_back(j);

  const auto k = static_cast<Eigen::Index>(keep.size());
  dec.eigenvalues.resize(k);
  dec.exact_modes.resize(u.rows(), k);
  dec.projected_modes.resize(u.rows(), k);
  dec.reduced_vectors.resize(u.cols(), k);
  if (opts.compute_adjoint) dec.adjoint_modes = Matrix(u.rows(), k);

  Matrix kept_vectors(u.cols(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index j = keep[c];
    const Complex lambda = eig.values(j);
    const Vector w = eig.vectors.col(j);
    const Vector bw = op.b * w;
    dec.eigenvalues(c) = lambda;
    dec.reduced_vectors.col(c) = w;
    dec.projected_modes.col(c) = u * w;
    if (std::abs(lambda) > dec.zero_tol)
      dec.exact_modes.col(c) = bw / lambda;
    else if (bw.norm() > std::sqrt(std::numeric_limits<double>::epsilon()) * bnorm)
      dec.exact_modes.col(c) = bw;
    else
      dec.exact_modes.col(c) = u * w;
    if (opts.compute_adjoint) dec.adjoint_modes->col(c) = u * eig.left_vectors->col(j);
    kept_vectors.col(c) = w;
  }
  warn_if_defective(kept_vectors, dec.warnings);
  dec.op = std::move(op);
  canonical_order(dec);
  return dec;
}

// Attaches psi = U z by matching eigenvalues of A~ to those already in dec.
inline void attach_adjoint(DmdDecomposition& dec, double eig_tol) {
  const EigenPairs eig = eig_dense(dec.op.a_tilde, true, eig_tol);
  const SpectrumMatch match = match_spectra(dec.eigenvalues, eig.values);
  Matrix psi(dec.op.svd_of_x.u.rows(), dec.size());
  for (Eigen::Index j = 0; j < dec.size(); ++j) {
    const Eigen::Index p = match.partner[static_cast<std::size_t>(j)];
    require(p >= 0, ErrorCategory::numerical, "adjoint modes: eigenvalue without partner");
    psi.col(j) = dec.op.svd_of_x.u * eig.left_vectors->col(p);
  }
  dec.adjoint_modes = std::move(psi);
}

}  // namespace detail

/// Exact DMD: modes phi = B w / lambda are eigenvectors of A = Y X^+.
inline DmdDecomposition exact_dmd(const SnapshotPairs& pairs, const DmdOptions& opts = {}) {
  return detail::decompose_reduced(reduced_operator(pairs, opts.rank), opts, Algorithm::exact);
}

/// Projected DMD: modes phi^ = U w, eigenvectors of P_X A.
inline DmdDecomposition projected_dmd(const SnapshotPairs& pairs, const DmdOptions& opts = {}) {
  return detail::decompose_reduced(reduced_operator(pairs, opts.rank), opts,
                                   Algorithm::projected);
}

/**
 * Exact DMD through an orthonormal basis Q of range([X Y]): eigenpairs of
 * A~_Q = Q^* A Q lifted as phi = Q v. Costlier than exact_dmd; kept as an
 * independent route to the same modes.
 */
inline DmdDecomposition exact_dmd_qr(const SnapshotPairs& pairs, const DmdOptions& opts = {}) {
  ReducedOperator op = reduced_operator(pairs, opts.rank);
  Matrix stacked(pairs.x.rows(), 2 * pairs.x.cols());
  stacked << pairs.x, pairs.y;
  const Matrix q = orthonormal_basis(stacked, opts.rank);
  const Matrix& u = op.svd_of_x.u;
  const Matrix a_q = (q.adjoint() * op.b) * (u.adjoint() * q);
  const EigenPairs eig = eig_dense(a_q, false, opts.eig_tol);

  DmdDecomposition dec;
  dec.algorithm = Algorithm::qr;
  dec.zero_tol = opts.zero_tol.value_or(detail::default_zero_tol(a_q));
  // rank(A) <= r_X, so at least r_Q - r_X eigenvalues of A~_Q vanish exactly.
  // Roundoff can lift them past zero_tol; drop that many smallest first.
  std::vector<Eigen::Index> by_size(static_cast<std::size_t>(eig.values.size()));
  for (std::size_t j = 0; j < by_size.size(); ++j) by_size[j] = static_cast<Eigen::Index>(j);
  std::stable_sort(by_size.begin(), by_size.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(eig.values(a)) < std::abs(eig.values(b));
  });
  const auto structural =
      static_cast<std::size_t>(std::max<Eigen::Index>(0, q.cols() - u.cols()));
  std::vector<bool> zero(by_size.size(), false);
  for (std::size_t j = 0; j < structural && j < by_size.size(); ++j) zero[by_size[j]] = true;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
    const bool is_zero = zero[j] || std::abs(eig.values(j)) <= dec.zero_tol;
    if (!is_zero || opts.include_zero_modes) keep.push_back(j);
  }
  const auto k = static_cast<Eigen::Index>(keep.size());
  dec.eigenvalues.resize(k);
  dec.exact_modes.resize(u.rows(), k);
  dec.projected_modes.resize(u.rows(), k);
  dec.reduced_vectors.resize(u.cols(), k);
  Matrix kept_vectors(q.cols(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index j = keep[c];
    dec.eigenvalues(c) = eig.values(j);
    dec.exact_modes.col(c) = q * eig.vectors.col(j);
    dec.reduced_vectors.col(c) = u.adjoint() * dec.exact_modes.col(c);
    dec.projected_modes.col(c) = u * dec.reduced_vectors.col(c);
    kept_vectors.col(c) = eig.vectors.col(j);
  }
  detail::warn_if_defective(kept_vectors, dec.warnings);
  dec.op = std::move(op);
  if (opts.compute_adjoint) detail::attach_adjoint(dec, opts.eig_tol);
  detail::canonical_order(dec);
  return dec;
}

/**
 * Exact DMD of a sequential series z_0..z_m via one Gram-Schmidt step:
 * phi = U w + q q^* B w / lambda with q the normalized part of z_m outside
 * range(U). When that part vanishes Q = U and the result equals projected DMD.
 */
template <class Derived>
DmdDecomposition exact_dmd_sequential(const Eigen::MatrixBase<Derived>& z,
                                      const DmdOptions& opts = {}) {
  const SnapshotPairs pairs = pairs_from_sequence(z);
  ReducedOperator op = reduced_operator(pairs, opts.rank);
  const Matrix& u = op.svd_of_x.u;
  const Vector zm = pairs.snapshots.col(pairs.snapshots.cols() - 1);
  Vector p = zm - u * (u.adjoint() * zm);
  p -= u * (u.adjoint() * p);
  const bool in_span = p.norm() <= opts.gs_tol * zm.norm();

  const EigenPairs eig = eig_dense(op.a_tilde, opts.compute_adjoint, opts.eig_tol);
  DmdDecomposition dec;
  dec.algorithm = Algorithm::sequential;
  dec.zero_tol = opts.zero_tol.value_or(detail::default_zero_tol(op.a_tilde));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < eig.values.size(); ++j)
    if (std::abs(eig.values(j)) > dec.zero_tol || opts.include_zero_modes) keep.push_back(j);
  const auto k = static_cast<Eigen::Index>(keep.size());
  dec.eigenvalues.resize(k);
  dec.exact_modes.resize(u.rows(), k);
  dec.projected_modes.resize(u.rows(), k);
  dec.reduced_vectors.resize(u.cols(), k);
  if (opts.compute_adjoint) dec.adjoint_modes = Matrix(u.rows(), k);
  const Vector q = in_span ? Vector() : Vector(p / p.norm());
  const double bnorm = op.b.norm();
  Matrix kept_vectors(u.cols(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index j = keep[c];
    const Complex lambda = eig.values(j);
    const Vector w = eig.vectors.col(j);
    dec.eigenvalues(c) = lambda;
    dec.reduced_vectors.col(c) = w;
    dec.projected_modes.col(c) = u * w;
    if (std::abs(lambda) > dec.zero_tol) {
      dec.exact_modes.col(c) = u * w;
      if (!in_span) dec.exact_modes.col(c) += q * (q.dot(op.b * w) / lambda);
    } else {
      const Vector bw = op.b * w;
      dec.exact_modes.col(c) =
          bw.norm() > std::sqrt(std::numeric_limits<double>::epsilon()) * bnorm ? bw : Vector(u * w);
    }
    if (opts.compute_adjoint) dec.adjoint_modes->col(c) = u * eig.left_vectors->col(j);
    kept_vectors.col(c) = w;
  }
  if (in_span) dec.warnings.emplace_back("last snapshot lies in span of earlier ones; Q = U");
  detail::warn_if_defective(kept_vectors, dec.warnings);
  dec.op = std::move(op);
  detail::canonical_order(dec);
  return dec;
}

inline DmdDecomposition run_dmd(const SnapshotPairs& pairs, Algorithm algorithm,
                                const DmdOptions& opts = {}) {
  switch (algorithm) {
    case Algorithm::exact: return exact_dmd(pairs, opts);
    case Algorithm::projected: return projected_dmd(pairs, opts);
    case Algorithm::qr: return exact_dmd_qr(pairs, opts);
    case Algorithm::sequential:
      detail::require(pairs.has_sequence(), ErrorCategory::precondition,
                      "sequential algorithm requires sequential pairs");
      return exact_dmd_sequential(pairs.snapshots, opts);
  }
  throw Error(ErrorCategory::precondition, "unknown algorithm");
}

struct AdjointModes {
  Vector eigenvalues;
  Matrix modes;  // psi_j = U z_j, z_j^* A~ = lambda_j z_j^*
};

/// Left eigenvectors of A = B U^*, all lying in range(X).
inline AdjointModes adjoint_modes(const ReducedOperator& op, double eig_tol = 1e-9) {
  const EigenPairs eig = eig_dense(op.a_tilde, true, eig_tol);
  return {eig.values, op.svd_of_x.u * *eig.left_vectors};
}

struct ConsistencyReport {
  bool consistent = false;
  double defect = 0.0;       // ||Y (I - X^+ X)||_F / ||Y||_F
  double ax_residual = 0.0;  // ||A X - Y||_F / ||Y||_F
  Eigen::Index rank = 0;
};

/// X and Y are linearly consistent when N(X) is contained in N(Y); equivalently A X = Y.
inline ConsistencyReport linear_consistency(const SnapshotPairs& pairs, double tol = 1e-10,
                                            const RankPolicy& policy = RankPolicy::automatic()) {
  ConsistencyReport rep;
  const double ynorm = pairs.y.norm();
  const ReducedOperator op = reduced_operator(pairs, policy);
  rep.rank = op.svd_of_x.rank;
  if (ynorm == 0.0) {
    rep.consistent = true;
    return rep;
  }
  const Matrix& v = op.svd_of_x.v;
  rep.defect = (pairs.y - (pairs.y * v) * v.adjoint()).norm() / ynorm;
  rep.ax_residual = (op.b * (op.svd_of_x.u.adjoint() * pairs.x) - pairs.y).norm() / ynorm;
  rep.consistent = rep.defect <= tol;
  return rep;
}

struct Reconstruction {
  Vector coefficients;
  double residual = 0.0;  // ||sum_j c_j phi_j - x||
};

/// Least-squares expansion of x in the primary modes via an orthogonal factorization.
inline Reconstruction reconstruct(const DmdDecomposition& dec, const Vector& x) {
  const Matrix& phi = dec.modes();
  detail::require(x.size() == phi.rows(), ErrorCategory::dimension,
                  "reconstruct: vector length does not match mode length");
  Reconstruction out;
  if (phi.cols() == 0) {
    out.coefficients = Vector();
    out.residual = x.norm();
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(phi);
  out.coefficients = cod.solve(x);
  out.residual = (phi * out.coefficients - x).norm();
  return out;
}

/// sum_j lambda_j^k c_j phi_j
inline Vector propagate(const DmdDecomposition& dec, const Vector& c, long steps) {
  detail::require(c.size() == dec.size(), ErrorCategory::dimension,
                  "propagate: coefficient count does not match mode count");
  detail::require(steps >= 0, ErrorCategory::precondition, "propagate: negative step count");
  Vector scaled(c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j)
    scaled(j) = detail::int_pow(dec.eigenvalues(j), steps) * c(j);
  return dec.modes() * scaled;
}

struct SpectrumPoint {
  Complex eigenvalue;
  double frequency = 0.0;           // arg(lambda) / (2 pi dt)
  double growth_discrete = 0.0;     // |lambda|
  double growth_continuous = 0.0;   // ln|lambda| / dt, -inf for lambda = 0
  double mode_norm = 0.0;
  double weighted_norm = 0.0;       // mode_norm * |lambda|^m_weight
};

inline std::vector<SpectrumPoint> spectrum(const DmdDecomposition& dec, double dt = 1.0,
                                           long m_weight = 0) {
  detail::require(dt > 0.0, ErrorCategory::precondition, "spectrum: dt must be positive");
  std::vector<SpectrumPoint> out;
  out.reserve(static_cast<std::size_t>(dec.size()));
  for (Eigen::Index j = 0; j < dec.size(); ++j) {
    SpectrumPoint s;
    s.eigenvalue = dec.eigenvalues(j);
    s.growth_discrete = std::abs(s.eigenvalue);
    s.mode_norm = dec.modes().col(j).norm();
    if (s.growth_discrete == 0.0) {
      s.frequency = 0.0;
      s.growth_continuous = -std::numeric_limits<double>::infinity();
    } else {
      s.frequency = std::arg(s.eigenvalue) / (2.0 * std::numbers::pi * dt);
      s.growth_continuous = std::log(s.growth_discrete) / dt;
    }
    s.weighted_norm =
        s.mode_norm * std::pow(s.growth_discrete, static_cast<double>(m_weight));
    out.push_back(s);
  }
  return out;
}

}  // namespace dmdkit
