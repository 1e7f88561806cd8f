// ERA on the impulse response of a small stable system, compared with DMD on
// the same Hankel pair.

#include <dmdkit/dmdkit.hpp>

#include <cstdio>

int main() {
  using namespace dmdkit;
  Eigen::Matrix3d a;
  a << 0.9, 0.2, 0.0,
      -0.2, 0.9, 0.0,
       0.0, 0.0, 0.5;
  Eigen::Vector3d b(1.0, 0.0, 1.0);
  Eigen::RowVector3d c(1.0, 1.0, 1.0);

  const MarkovSequence seq = impulse_markov(a, b, c, 12);
  const HankelPair hp = build_hankel(seq);
  const EraRealization era = era_realize(hp, std::nullopt, 1, 1, std::nullopt,
                                         RankPolicy::relative(1e-10));
  std::printf("Hankel %ldx%ld, order %ld\n", static_cast<long>(hp.h.rows()),
              static_cast<long>(hp.h.cols()), static_cast<long>(era.order));

  const EraDmdReport rep = era_dmd_similarity(hp, RankPolicy::relative(1e-10));
  for (Eigen::Index j = 0; j < rep.era_eigs.size(); ++j)
    std::printf("  era % .12f %+.12fi\n", rep.era_eigs(j).real(), rep.era_eigs(j).imag());
  std::printf("max |era - dmd| = %.3e, vector map residual = %.3e\n", rep.max_mismatch,
              rep.vector_map_residual);

  for (Eigen::Index k = 0; k < 4; ++k)
    std::printf("h_%ld: true %.12f, model %.12f\n", static_cast<long>(k),
                seq.params[static_cast<std::size_t>(k)](0, 0).real(), era.markov(k)(0, 0).real());
  return 0;
}
