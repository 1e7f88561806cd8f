#pragma once

#include <dmdkit/types.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dmdkit {

enum class Provenance { sequential, strided, concatenated, generic, delay_embedded };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::sequential: return "sequential";
    case Provenance::strided: return "strided";
    case Provenance::concatenated: return "concatenated";
    case Provenance::generic: return "generic";
    case Provenance::delay_embedded: return "delay-embedded";
  }
  return "unknown";
}

/**
 * Paired data matrices. Column k of x is paired with column k of y; that
 * correspondence is the only structural contract.
 *
 * For sequential and delay-embedded data the full snapshot list z_0..z_m is
 * kept in `snapshots` so later steps (delay embedding, the Gram-Schmidt
 * variant of exact DMD, amplitude scaling) can reach it.
 */
struct SnapshotPairs {
  Matrix x;
  Matrix y;
  std::optional<double> dt;
  Provenance provenance = Provenance::generic;
  Matrix snapshots;

  Eigen::Index state_dim() const { return x.rows(); }
  Eigen::Index count() const { return x.cols(); }
  bool has_sequence() const { return snapshots.cols() > 0; }
};

/// Independent sequential runs sharing one state dimension; columns are snapshots.
struct TrajectorySet {
  std::vector<Matrix> trajectories;
};

/// Generic pairs from explicit X and Y.
template <class DX, class DY>
SnapshotPairs make_pairs(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
                         std::optional<double> dt = std::nullopt) {
  detail::require(x.rows() == y.rows() && x.cols() == y.cols(), ErrorCategory::dimension,
                  "make_pairs: X and Y must have identical dimensions");
  detail::require(x.rows() >= 1 && x.cols() >= 1, ErrorCategory::dimension,
                  "make_pairs: empty data");
  SnapshotPairs p;
  p.x = detail::to_complex(x);
  p.y = detail::to_complex(y);
  detail::require_finite(p.x, "make_pairs");
  detail::require_finite(p.y, "make_pairs");
  p.dt = dt;
  return p;
}

/// X = [z_0 .. z_{m-1}], Y = [z_1 .. z_m] from the columns of z.
template <class Derived>
SnapshotPairs pairs_from_sequence(const Eigen::MatrixBase<Derived>& z,
                                  std::optional<double> dt = std::nullopt) {
  detail::require(z.cols() >= 2, ErrorCategory::precondition,
                  "pairs_from_sequence: need at least 2 snapshots");
  const Eigen::Index m = z.cols() - 1;
  SnapshotPairs p = make_pairs(z.leftCols(m), z.rightCols(m), dt);
  p.provenance = Provenance::sequential;
  p.snapshots = detail::to_complex(z);
  return p;
}

/**
 * X = [z_0, z_P, ..., z_{(m-1)P}], Y = [z_1, z_{P+1}, ..., z_{(m-1)P+1}].
 *
 * Each pair stays one step of the flow map apart while pairs are P steps
 * apart. Without `count`, m is the largest value the list supports.
 */
template <class Derived>
SnapshotPairs pairs_from_strided(const Eigen::MatrixBase<Derived>& z, Eigen::Index stride,
                                 std::optional<Eigen::Index> count = std::nullopt,
                                 std::optional<double> dt = std::nullopt) {
  detail::require(stride >= 1, ErrorCategory::precondition,
                  "pairs_from_strided: stride must be positive");
  detail::require(z.cols() >= 2, ErrorCategory::precondition,
                  "pairs_from_strided: need at least 2 snapshots");
  const Eigen::Index available = (z.cols() - 2) / stride + 1;
  const Eigen::Index m = count.value_or(available);
  detail::require(m >= 1 && m <= available, ErrorCategory::precondition,
                  "pairs_from_strided: list of " + std::to_string(z.cols()) +
                      " snapshots cannot supply " + std::to_string(m) +
                      " pairs at stride " + std::to_string(stride));
  Matrix x(z.rows(), m), y(z.rows(), m);
  for (Eigen::Index k = 0; k < m; ++k) {
    x.col(k) = z.col(k * stride).template cast<Complex>();
    y.col(k) = z.col(k * stride + 1).template cast<Complex>();
  }
  SnapshotPairs p = make_pairs(x, y, dt);
  p.provenance = stride == 1 ? Provenance::sequential : Provenance::strided;
  if (stride == 1) p.snapshots = detail::to_complex(z.leftCols(m + 1));
  return p;
}

/// Column-wise concatenation of every trajectory's sequential pairs.
inline SnapshotPairs pairs_from_trajectories(const TrajectorySet& ts,
                                             std::optional<double> dt = std::nullopt) {
  detail::require(!ts.trajectories.empty(), ErrorCategory::precondition,
                  "pairs_from_trajectories: no trajectories");
  const Eigen::Index n = ts.trajectories.front().rows();
  Eigen::Index total = 0;
  for (const auto& t : ts.trajectories) {
    detail::require(t.rows() == n, ErrorCategory::dimension,
                    "pairs_from_trajectories: trajectories disagree on state dimension");
    detail::require(t.cols() >= 2, ErrorCategory::precondition,
                    "pairs_from_trajectories: every trajectory needs at least 2 snapshots");
    total += t.cols() - 1;
  }
  if (ts.trajectories.size() == 1) return pairs_from_sequence(ts.trajectories.front(), dt);
  Matrix x(n, total), y(n, total);
  Eigen::Index at = 0;
  for (const auto& t : ts.trajectories) {
    const Eigen::Index mj = t.cols() - 1;
    x.middleCols(at, mj) = t.leftCols(mj);
    y.middleCols(at, mj) = t.rightCols(mj);
    at += mj;
  }
  SnapshotPairs p = make_pairs(x, y, dt);
  p.provenance = Provenance::concatenated;
  return p;
}

/**
 * Stacks d time-shifted copies: column k becomes [z_k; z_{k+1}; ...; z_{k+d-1}].
 * Trailing columns without a full window are dropped. d = 1 is the identity.
 */
inline SnapshotPairs delay_embed(const SnapshotPairs& pairs, Eigen::Index depth) {
  detail::require(depth >= 1, ErrorCategory::precondition, "delay_embed: depth must be >= 1");
  if (depth == 1) return pairs;
  detail::require(pairs.has_sequence(), ErrorCategory::precondition,
                  std::string("delay_embed: needs a sequential snapshot list, got ") +
                      to_string(pairs.provenance) + " pairs");
  const Matrix& z = pairs.snapshots;
  const Eigen::Index n = z.rows();
  const Eigen::Index embedded = z.cols() - depth + 1;
  detail::require(embedded >= 2, ErrorCategory::precondition,
                  "delay_embed: depth " + std::to_string(depth) + " exceeds the " +
                      std::to_string(z.cols()) + " available snapshots");
  Matrix stacked(n * depth, embedded);
  for (Eigen::Index k = 0; k < embedded; ++k)
    for (Eigen::Index s = 0; s < depth; ++s) stacked.block(s * n, k, n, 1) = z.col(k + s);
  SnapshotPairs out = pairs_from_sequence(stacked, pairs.dt);
  out.provenance = Provenance::delay_embedded;
  return out;
}

enum class MeanMode { x_mean, pooled };

/// Removes a mean vector from every column of X and Y; the mean is returned for re-addition.
inline std::pair<SnapshotPairs, Vector> subtract_mean(const SnapshotPairs& pairs, MeanMode mode) {
  Vector mean = pairs.x.rowwise().mean();
  if (mode == MeanMode::pooled)
    mean = (pairs.x.rowwise().sum() + pairs.y.rowwise().sum()) /
           static_cast<double>(2 * pairs.count());
  SnapshotPairs out = pairs;
  out.x.colwise() -= mean;
  out.y.colwise() -= mean;
  if (out.has_sequence()) out.snapshots.colwise() -= mean;
  return {std::move(out), std::move(mean)};
}

inline SnapshotPairs add_mean(const SnapshotPairs& pairs, const Vector& mean) {
  detail::require(mean.size() == pairs.state_dim(), ErrorCategory::dimension,
                  "add_mean: mean length does not match state dimension");
  SnapshotPairs out = pairs;
  out.x.colwise() += mean;
  out.y.colwise() += mean;
  if (out.has_sequence()) out.snapshots.colwise() += mean;
  return out;
}

/// Applies the same column permutation to X and Y; column k of the result is column perm[k].
inline SnapshotPairs permute_columns(const SnapshotPairs& pairs,
                                     const std::vector<Eigen::Index>& perm) {
  const Eigen::Index m = pairs.count();
  detail::require(static_cast<Eigen::Index>(perm.size()) == m, ErrorCategory::precondition,
                  "permute_columns: permutation length differs from column count");
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  for (auto k : perm) {
    detail::require(k >= 0 && k < m && !seen[static_cast<std::size_t>(k)],
                    ErrorCategory::precondition, "permute_columns: not a permutation");
    seen[static_cast<std::size_t>(k)] = true;
  }
  SnapshotPairs out;
  out.x.resize(pairs.x.rows(), m);
  out.y.resize(pairs.y.rows(), m);
  for (Eigen::Index k = 0; k < m; ++k) {
    out.x.col(k) = pairs.x.col(perm[static_cast<std::size_t>(k)]);
    out.y.col(k) = pairs.y.col(perm[static_cast<std::size_t>(k)]);
  }
  out.dt = pairs.dt;
  bool identity = true;
  for (Eigen::Index k = 0; k < m; ++k) identity = identity && perm[static_cast<std::size_t>(k)] == k;
  out.provenance = identity ? pairs.provenance : Provenance::generic;
  if (identity) out.snapshots = pairs.snapshots;
  return out;
}

}  // namespace dmdkit
