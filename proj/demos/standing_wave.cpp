// A standing wave cos(k theta) q fools plain DMD: one snapshot row cannot carry
// both e^{+i theta} and e^{-i theta}. Two delays restore the pair.

#include <dmdkit/dmdkit.hpp>

#include <cstdio>

int main() {
  using namespace dmdkit;
  const double theta = 0.7853981633974483;
  Eigen::VectorXd q(3);
  q << 1.0, -2.0, 0.5;
  const Eigen::MatrixXd z = gen_standing_wave(theta, q, 20);

  const SnapshotPairs plain = pairs_from_sequence(z);
  const auto c1 = linear_consistency(plain);
  const auto d1 = exact_dmd(plain);
  std::printf("plain:   defect %.3e, %ld eigenvalue(s)\n", c1.defect,
              static_cast<long>(d1.size()));
  for (Eigen::Index j = 0; j < d1.size(); ++j)
    std::printf("  % .12f %+.12fi\n", d1.eigenvalues(j).real(), d1.eigenvalues(j).imag());

  const SnapshotPairs delayed = delay_embed(plain, 2);
  const auto c2 = linear_consistency(delayed);
  const auto d2 = exact_dmd(delayed);
  std::printf("delay 2: defect %.3e, %ld eigenvalue(s)\n", c2.defect,
              static_cast<long>(d2.size()));
  for (Eigen::Index j = 0; j < d2.size(); ++j)
    std::printf("  % .12f %+.12fi\n", d2.eigenvalues(j).real(), d2.eigenvalues(j).imag());
  return 0;
}
