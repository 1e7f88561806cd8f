#include <dmdkit/generators.hpp>
#include <dmdkit/io/csv.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

using namespace dmdkit;

TEST(Csv, RoundTripIsBitExact) {
  GaussianStream rng(5);
  Eigen::MatrixXd m = rng.normal_matrix(4, 7);
  m(0, 0) = 1e-300;
  m(1, 1) = -0.1;
  m(2, 2) = 1.0 / 3.0;
  std::stringstream ss;
  io::write_rows(ss, m);
  const auto back = io::parse_csv(ss);
  EXPECT_EQ(back, m);
}

TEST(Csv, HeaderIsSkippedOnRequest) {
  std::stringstream ss("t0,t1,t2\n1,2,3\n4,5,6\n");
  const auto m = io::parse_csv(ss, true);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 3);
  EXPECT_EQ(m(1, 2), 6.0);
}

TEST(Csv, WhitespaceAndBlankLinesTolerated) {
  std::stringstream ss("\n 1 , 2\r\n\n3,4 \n");
  const auto m = io::parse_csv(ss);
  EXPECT_EQ(m.rows(), 2);
  EXPECT_EQ(m(1, 0), 3.0);
}

TEST(Csv, ParseErrors) {
  for (const char* bad : {"1,2\n3\n", "1,x\n", "1,,2\n", "1,2,\n", "", "nan,1\n", "1e999,1\n"}) {
    std::stringstream ss(bad);
    try {
      io::parse_csv(ss);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.category(), ErrorCategory::parse) << bad;
    }
  }
}

TEST(Csv, HeaderWithoutFlagIsParseError) {
  std::stringstream ss("a,b\n1,2\n");
  EXPECT_THROW(io::parse_csv(ss), Error);
}

TEST(Csv, MissingFileIsIoError) {
  try {
    io::read_csv("/nonexistent/dir/file.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::io);
  }
}

TEST(Csv, InterleaveRoundTrip) {
  Matrix c(2, 2);
  c << Complex(1, 2), Complex(3, -4), Complex(0.5, 0), Complex(-1, 1e-17);
  const auto il = io::interleave(c);
  EXPECT_EQ(il.cols(), 4);
  EXPECT_EQ(il(0, 1), 2.0);
  EXPECT_EQ(io::deinterleave(il), c);
  EXPECT_THROW(io::deinterleave(Eigen::MatrixXd::Ones(2, 3)), Error);
}

TEST(Csv, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "dmdkit_csv_roundtrip.csv";
  GaussianStream rng(9);
  const Eigen::MatrixXd m = rng.normal_matrix(3, 5);
  io::write_csv(path.string(), m, {"a", "b", "c", "d", "e"});
  EXPECT_EQ(io::read_csv(path.string(), true), m);
  std::filesystem::remove(path);
}
