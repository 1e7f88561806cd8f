#include <dmdkit/dmdkit.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace dmdkit;

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr together
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(DMDKIT_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("dmdkit_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, NoiselessAr1RecoversLambda) {
  ASSERT_EQ(run("gen --kind ar1 --lambda 0.5 --sigma2 0 --z0 1 --steps 10 -o " + path("z.csv")).code, 0);
  const auto r = run("dmd -i " + path("z.csv") + " -o " + path("out"));
  ASSERT_EQ(r.code, 0) << r.output;
  const Eigen::MatrixXd eig = io::read_csv(path("out/eigenvalues.csv"), true);
  ASSERT_EQ(eig.rows(), 1);
  EXPECT_NEAR(eig(0, 0), 0.5, 1e-12);
  EXPECT_EQ(eig(0, 1), 0.0);
  EXPECT_NEAR(eig(0, 4), std::log(0.5), 1e-12);
  const std::string report = slurp(path("out/report.txt"));
  EXPECT_NE(report.find("rank: 1"), std::string::npos);
  EXPECT_NE(report.find("consistent: yes"), std::string::npos);
}

TEST_F(CliTest, CheckFlagsStandingWaveAndSuggestsDelay) {
  ASSERT_EQ(run("gen --kind standing-wave --theta 0.7853981633974483 --q 1,2,-1 --steps 12 -o " +
                path("z.csv"))
                .code,
            0);
  const auto plain = run("check -i " + path("z.csv"));
  ASSERT_EQ(plain.code, 0) << plain.output;
  EXPECT_NE(plain.output.find("consistent: no"), std::string::npos);
  EXPECT_NE(plain.output.find("--delay 2"), std::string::npos);

  const auto delayed = run("check -i " + path("z.csv") + " --delay 2");
  ASSERT_EQ(delayed.code, 0) << delayed.output;
  EXPECT_NE(delayed.output.find("consistent: yes"), std::string::npos);
  EXPECT_EQ(delayed.output.find("suggestion"), std::string::npos);
}

TEST_F(CliTest, DelayedStandingWaveGivesConjugatePair) {
  ASSERT_EQ(run("gen --kind standing-wave --theta 0.7853981633974483 --q 1,2,-1 --steps 12 -o " +
                path("z.csv"))
                .code,
            0);
  ASSERT_EQ(run("dmd -i " + path("z.csv") + " --delay 2 -o " + path("out")).code, 0);
  const Eigen::MatrixXd eig = io::read_csv(path("out/eigenvalues.csv"), true);
  ASSERT_EQ(eig.rows(), 2);
  const double h = std::sqrt(0.5);
  for (Eigen::Index j = 0; j < 2; ++j) {
    EXPECT_NEAR(eig(j, 0), h, 1e-8);
    EXPECT_NEAR(std::abs(eig(j, 1)), h, 1e-8);
  }
  EXPECT_NEAR(eig(0, 1), -eig(1, 1), 1e-12);
}

TEST_F(CliTest, EraPolesMatchDmdOnHankelPair) {
  Eigen::Matrix3d a;
  a << 0.8, 0.3, 0.0, -0.3, 0.8, 0.0, 0.0, 0.0, -0.6;
  const Eigen::Vector3d b(1.0, 0.5, 1.0);
  const Eigen::RowVector3d c(1.0, -1.0, 2.0);
  Eigen::MatrixXd response(1, 12);
  Eigen::Vector3d state = b;
  for (Eigen::Index k = 0; k < response.cols(); ++k) {
    response(0, k) = c * state;
    state = a * state;
  }
  io::write_csv(path("h.csv"), response);

  const auto era = run("era -i " + path("h.csv") + " --order full --rank-rel 1e-10 -o " + path("era"));
  ASSERT_EQ(era.code, 0) << era.output;
  const auto dmd = run("dmd --pairing paired -i " + path("era/hankel.csv") + " -i " +
                       path("era/hankel_shifted.csv") + " --rank-rel 1e-10 -o " + path("dmd"));
  ASSERT_EQ(dmd.code, 0) << dmd.output;

  const Eigen::MatrixXd poles = io::read_csv(path("era/poles.csv"), true);
  const Eigen::MatrixXd eigs = io::read_csv(path("dmd/eigenvalues.csv"), true);
  ASSERT_EQ(poles.rows(), 3);
  ASSERT_EQ(eigs.rows(), 3);
  Vector pe(3), de(3);
  for (Eigen::Index j = 0; j < 3; ++j) {
    pe(j) = {poles(j, 0), poles(j, 1)};
    de(j) = {eigs(j, 0), eigs(j, 1)};
  }
  EXPECT_LE(match_spectra(pe, de).max_abs_error, 1e-9);

  const EigenPairs truth = eig_dense(detail::to_complex(a));
  EXPECT_LE(match_spectra(truth.values, pe).max_abs_error, 1e-9);
}

TEST_F(CliTest, LimWritesGreenEqualToATilde) {
  ASSERT_EQ(run("gen --kind random-linear --n 3 --steps 40 --seed 9 -o " + path("z.csv")).code, 0);
  const auto r = run("lim -i " + path("z.csv") + " -o " + path("lim"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(slurp(path("lim/report.txt")).find("equivalent: yes"), std::string::npos);
  const Eigen::MatrixXd g = io::read_csv(path("lim/green.csv"), true);
  const Eigen::MatrixXd at = io::read_csv(path("lim/a_tilde.csv"), true);
  ASSERT_EQ(g.rows(), at.rows());
  ASSERT_EQ(g.cols(), at.cols());
  EXPECT_LE((g - at).cwiseAbs().maxCoeff(), 1e-10 * at.norm());
}

TEST_F(CliTest, OutputIsByteIdenticalAcrossRuns) {
  ASSERT_EQ(run("gen --kind noisy-rotation --theta 0.3 --radius 0.97 --noise-sd 0.05 --steps 80 "
                "--seed 4 -o " + path("z1.csv")).code, 0);
  ASSERT_EQ(run("gen --kind noisy-rotation --theta 0.3 --radius 0.97 --noise-sd 0.05 --steps 80 "
                "--seed 4 -o " + path("z2.csv")).code, 0);
  EXPECT_EQ(slurp(path("z1.csv")), slurp(path("z2.csv")));
  const std::string flags = " --scaling amplitude-qr --m-weight 2 --dt 0.5";
  ASSERT_EQ(run("dmd -i " + path("z1.csv") + flags + " -o " + path("a")).code, 0);
  ASSERT_EQ(run("dmd -i " + path("z1.csv") + flags + " -o " + path("b")).code, 0);
  for (const char* f : {"eigenvalues.csv", "modes.csv", "report.txt"})
    EXPECT_EQ(slurp(path(std::string("a/") + f)), slurp(path(std::string("b/") + f))) << f;
}

TEST_F(CliTest, BiorthogonalScalingWritesAdjointModes) {
  ASSERT_EQ(run("gen --kind random-linear --n 4 --steps 30 --seed 2 -o " + path("z.csv")).code, 0);
  ASSERT_EQ(run("dmd -i " + path("z.csv") + " --scaling biorthogonal -o " + path("out")).code, 0);
  const Matrix phi = io::deinterleave(io::read_csv(path("out/modes.csv"), true));
  const Matrix psi = io::deinterleave(io::read_csv(path("out/adjoint_modes.csv"), true));
  const Matrix gram = psi.adjoint() * phi;
  EXPECT_LE((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_F(CliTest, ExitCodes) {
  std::ofstream(path("bad.csv")) << "1,2\n3,x\n";
  std::ofstream(path("zero.csv")) << "0,0,0\n0,0,0\n";
  std::ofstream(path("x.csv")) << "1,0\n0,1\n";
  std::ofstream(path("y3.csv")) << "1,0\n0,1\n1,1\n";
  std::ofstream(path("offset.csv")) << "5,6,7,8\n";

  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("dmd --no-such-flag -i " + path("x.csv")).code, 2);
  EXPECT_EQ(run("dmd --pairing paired -i " + path("x.csv") + " -i " + path("x.csv") +
                " --algorithm sequential")
                .code,
            2);
  EXPECT_EQ(run("dmd -i " + path("x.csv") + " --stride 2").code, 2);

  const auto parse = run("dmd -i " + path("bad.csv"));
  EXPECT_EQ(parse.code, 3);
  EXPECT_NE(parse.output.find("2:2"), std::string::npos) << parse.output;

  EXPECT_EQ(run("dmd --pairing paired -i " + path("x.csv") + " -i " + path("y3.csv")).code, 4);
  EXPECT_EQ(run("dmd -i " + path("zero.csv") + " -o " + path("o")).code, 5);
  EXPECT_EQ(run("lim --mean none -i " + path("offset.csv") + " -o " + path("o")).code, 6);

  const auto nyquist = run("gen --kind two-timescale --f-fast 0.6 -o " + path("t.csv"));
  EXPECT_EQ(nyquist.code, 6);
  EXPECT_NE(nyquist.output.find("Nyquist"), std::string::npos);

  EXPECT_EQ(run("dmd -i " + path("missing.csv")).code, 8);
}

}  // namespace
