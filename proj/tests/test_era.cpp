#include <dmdkit/era.hpp>
#include <dmdkit/generators.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace dmdkit;

namespace {

const RankPolicy kEraRank = RankPolicy::relative(1e-10);

MarkovSequence scalar_half(Eigen::Index m) {
  Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1);
  a << 0.5;
  b << 1.0;
  c << 1.0;
  return impulse_markov(a, b, c, m);
}

struct RandomSystem {
  Eigen::MatrixXd a, b, c;
  Eigen::VectorXcd eigs;
};

RandomSystem random_system(Eigen::Index n, Eigen::Index p, Eigen::Index q, std::uint64_t seed) {
  const auto lin = gen_random_linear(n, 2, 0.9, seed);
  return {lin.m, oracle::random_real(n, p, seed + 1), oracle::random_real(q, n, seed + 2),
          lin.eigenvalues};
}

}  // namespace

TEST(BuildHankel, ScalarHalfSystemByHand) {
  const auto hp = build_hankel(scalar_half(3), 1, 1);
  Matrix h(2, 2), hs(2, 2);
  h << 1, 0.5, 0.5, 0.25;
  hs << 0.5, 0.25, 0.25, 0.125;
  EXPECT_LE((hp.h - h).norm(), 1e-16);
  EXPECT_LE((hp.h_shifted - hs).norm(), 1e-16);
}

TEST(BuildHankel, SingleBlockRow) {
  const auto seq = scalar_half(4);
  const auto hp = build_hankel(seq, 3, 0);
  ASSERT_EQ(hp.h.rows(), 1);
  ASSERT_EQ(hp.h.cols(), 4);
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_EQ(hp.h(0, j), seq.params[j](0, 0));
}

TEST(BuildHankel, ScalarSymmetryAndShape) {
  const auto sys = random_system(3, 2, 3, 5);
  const auto seq = impulse_markov(sys.a, sys.b, sys.c, 7);
  const auto hp = build_hankel(seq, 2, 4);
  EXPECT_EQ(hp.h.rows(), 3 * 5);
  EXPECT_EQ(hp.h.cols(), 2 * 3);
  for (Eigen::Index i = 0; i <= 4; ++i)
    for (Eigen::Index j = 0; j <= 2; ++j)
      EXPECT_EQ(Matrix(hp.h.block(i * 3, j * 2, 3, 2)), seq.params[i + j]);

  const auto s1 = random_system(3, 1, 1, 6);
  const auto hs = build_hankel(impulse_markov(s1.a, s1.b, s1.c, 7), 3, 3);
  EXPECT_EQ(hs.h, hs.h.transpose());
  EXPECT_EQ(hs.h_shifted, hs.h_shifted.transpose());
}

TEST(BuildHankel, ConstraintAndShortInput) {
  const auto seq = scalar_half(5);
  EXPECT_THROW(build_hankel(seq, 2, 3), Error);
  EXPECT_THROW(build_hankel(seq, 1, 1), Error);
  EXPECT_NO_THROW(build_hankel(seq, 2, 2));
  const auto hp = build_hankel(seq);
  EXPECT_EQ(hp.m_o, 2);
  EXPECT_EQ(hp.m_c + hp.m_o, 4);
}

TEST(BuildHankel, LinearInInputs) {
  const auto s1 = random_system(2, 1, 2, 10), s2 = random_system(3, 1, 2, 20);
  auto a = impulse_markov(s1.a, s1.b, s1.c, 6), b = impulse_markov(s2.a, s2.b, s2.c, 6);
  MarkovSequence sum = a;
  for (std::size_t k = 0; k < sum.params.size(); ++k) {
    sum.params[k] += 2.0 * b.params[k];
    sum.shifted[k] += 2.0 * b.shifted[k];
  }
  const auto ha = build_hankel(a, 2, 3), hb = build_hankel(b, 2, 3), hs = build_hankel(sum, 2, 3);
  EXPECT_LE((hs.h - ha.h - 2.0 * hb.h).norm(), 1e-14);
  EXPECT_LE((hs.h_shifted - ha.h_shifted - 2.0 * hb.h_shifted).norm(), 1e-14);
}

TEST(EraRealize, ScalarOrderOne) {
  const auto hp = build_hankel(scalar_half(5));
  const auto era = era_realize(hp, 1, 1, 1, std::nullopt, kEraRank);
  ASSERT_EQ(era.a_r.rows(), 1);
  EXPECT_NEAR(std::abs(era.a_r(0, 0) - 0.5), 0.0, 1e-15);
  for (Eigen::Index k = 0; k < 5; ++k)
    EXPECT_NEAR(std::abs(era.markov(k)(0, 0) - std::pow(0.5, static_cast<double>(k))), 0.0, 1e-14);
}

TEST(EraRealize, ReproducesMarkovParameters) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto sys = random_system(3, 2, 2, seed * 7);
    const auto seq = impulse_markov(sys.a, sys.b, sys.c, 9);
    const auto era = era_realize(build_hankel(seq), std::nullopt, 2, 2, std::nullopt, kEraRank);
    EXPECT_EQ(era.order, 3);
    for (Eigen::Index k = 0; k < seq.size(); ++k)
      EXPECT_LE((era.markov(k) - seq.params[k]).norm(), 1e-9 * seq.params[0].norm());
    EXPECT_LE(oracle::nearest_distance(eig_dense(era.a_r).values, sys.eigs), 1e-8);
  }
}

TEST(EraRealize, FactorsReproduceAr) {
  const auto sys = random_system(4, 1, 1, 3);
  const auto era = era_realize(build_hankel(impulse_markov(sys.a, sys.b, sys.c, 11)), std::nullopt,
                               1, 1, std::nullopt, kEraRank);
  const auto& s = era.svd_of_h;
  const Eigen::Index r = era.order;
  const Matrix ur = s.u.leftCols(r), vr = s.v.leftCols(r);
  Matrix s_mhalf = Matrix::Zero(r, r);
  for (Eigen::Index i = 0; i < r; ++i) s_mhalf(i, i) = 1.0 / std::sqrt(s.sigma(i));
  const Matrix ref = s_mhalf * ur.adjoint() * era.hankel_shifted * vr * s_mhalf;
  EXPECT_LE((era.a_r - ref).norm(), 1e-12 * ref.norm());
}

TEST(EraRealize, FeedthroughPassesThrough) {
  const auto hp = build_hankel(scalar_half(5));
  Matrix d(1, 1);
  d << 0.25;
  EXPECT_EQ(era_realize(hp, 1, 1, 1, d, kEraRank).d_r, d);
  EXPECT_EQ(era_realize(hp, 1, 1, 1, std::nullopt, kEraRank).d_r, Matrix::Zero(1, 1));
  EXPECT_THROW(era_realize(hp, 1, 1, 1, Matrix::Zero(2, 1), kEraRank), Error);
}

TEST(EraRealize, OrderAboveRankRejected) {
  const auto hp = build_hankel(scalar_half(5));
  try {
    era_realize(hp, 2, 1, 1, std::nullopt, kEraRank);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::precondition);
  }
}

TEST(EraRealize, StridedParametersKeepOneStepPoles) {
  const auto sys = random_system(3, 1, 1, 44);
  const auto seq = impulse_markov(sys.a, sys.b, sys.c, 9, 3);
  const auto era = era_realize(build_hankel(seq), std::nullopt, 1, 1, std::nullopt, kEraRank);
  EXPECT_LE(oracle::nearest_distance(eig_dense(era.a_r).values, sys.eigs), 1e-8);
}

TEST(MarkovFromResponse, MatchesImpulseMarkov) {
  const auto sys = random_system(3, 2, 1, 8);
  std::vector<Matrix> response;
  Eigen::MatrixXd state = sys.b;
  for (int k = 0; k < 30; ++k) {
    response.push_back((sys.c * state).cast<Complex>());
    state = sys.a * state;
  }
  const auto from = markov_from_response(response, 4);
  const auto direct = impulse_markov(sys.a, sys.b, sys.c, from.size(), 4);
  ASSERT_EQ(from.size(), 8);
  for (Eigen::Index k = 0; k < from.size(); ++k) {
    EXPECT_LE((from.params[k] - direct.params[k]).norm(), 1e-13);
    EXPECT_LE((from.shifted[k] - direct.shifted[k]).norm(), 1e-13);
  }
}

TEST(EraDmdSimilarity, ScalarHalfSystem) {
  const auto rep = era_dmd_similarity(build_hankel(scalar_half(5)), kEraRank);
  ASSERT_EQ(rep.era_eigs.size(), 1);
  EXPECT_NEAR(std::abs(rep.era_eigs(0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(rep.dmd_eigs(0) - 0.5), 0.0, 1e-15);
}

TEST(EraDmdSimilarity, RandomStableSystems) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sys = random_system(3, 1, 1, seed * 13);
    const auto rep =
        era_dmd_similarity(build_hankel(impulse_markov(sys.a, sys.b, sys.c, 9)), kEraRank);
    EXPECT_EQ(rep.rank, 3);
    EXPECT_LE(rep.max_mismatch, 1e-9);
    EXPECT_LE(rep.vector_map_residual, 1e-9);
  }
}

TEST(EraDmdSimilarity, DiagonalSystemVectorMap) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a.diagonal() << 0.9, -0.4, 0.2;
  const Eigen::MatrixXd b = Eigen::Vector3d(1, 1, 1), c = Eigen::RowVector3d(1, 2, -1);
  const auto hp = build_hankel(impulse_markov(a, b, c, 7));
  const auto rep = era_dmd_similarity(hp, kEraRank);
  EXPECT_LE(rep.vector_map_residual, 1e-9);
  // Explicit similarity: A_r = S^{-1/2} A~ S^{1/2}.
  const auto era = era_realize(hp, std::nullopt, 1, 1, std::nullopt, kEraRank);
  const auto op = reduced_operator(make_pairs(hp.h, hp.h_shifted), kEraRank);
  const RealVector sh = op.svd_of_x.sigma.cwiseSqrt();
  const Matrix sim = sh.cwiseInverse().asDiagonal() * op.a_tilde * sh.asDiagonal();
  EXPECT_LE((era.a_r - sim).norm(), 1e-10 * era.a_r.norm());
}

TEST(EraDmdSimilarity, DelayStackingRecoversStandingWave) {
  // Output-only standing wave as a Markov sequence (p = q = 1).
  const double theta = 0.9;
  MarkovSequence seq;
  for (int k = 0; k < 12; ++k) {
    seq.params.push_back(Matrix::Constant(1, 1, std::cos(k * theta)));
    seq.shifted.push_back(Matrix::Constant(1, 1, std::cos((k + 1) * theta)));
  }
  const auto flat = build_hankel(seq, 11, 0);
  const auto stacked = build_hankel(seq, 10, 1);
  EXPECT_EQ(reduced_svd(flat.h, kEraRank).rank, 1);
  EXPECT_EQ(reduced_svd(stacked.h, kEraRank).rank, 2);
  const auto rep = era_dmd_similarity(stacked, kEraRank);
  Vector truth(2);
  truth << std::polar(1.0, theta), std::polar(1.0, -theta);
  EXPECT_LE(match_spectra(rep.dmd_eigs, truth).max_abs_error, 1e-8);
  EXPECT_LE(match_spectra(rep.era_eigs, truth).max_abs_error, 1e-8);
}
