#pragma once

#include <dmdkit/types.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace dmdkit::io {

// Snapshot CSV: one snapshot per column, comma-separated, optional single
// header row. Numbers are written with %.17g so that a write/read cycle
// reproduces every double exactly.

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_cell(const std::string& cell, std::size_t line, std::size_t col,
                         const std::string& source) {
  const std::string t = trim(cell);
  const auto fail = [&](const std::string& why) {
    throw Error(ErrorCategory::parse, source + ":" + std::to_string(line) + ":" +
                                          std::to_string(col) + ": " + why + " '" + t + "'");
  };
  if (t.empty()) fail("empty cell");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) fail("not a number");
  if (errno == ERANGE && std::abs(v) > 1.0) fail("out of range");
  if (!std::isfinite(v)) fail("non-finite value");
  return v;
}

}  // namespace detail

inline Eigen::MatrixXd parse_csv(std::istream& in, bool header = false,
                                 const std::string& source = "<input>") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool skipped_header = !header;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) row.push_back(detail::parse_cell(cell, lineno, ++col, source));
    if (!line.empty() && line.back() == ',') detail::parse_cell("", lineno, col + 1, source);
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCategory::parse, source + ":" + std::to_string(lineno) + ": expected " +
                                            std::to_string(rows.front().size()) +
                                            " columns, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCategory::parse, source + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

inline Eigen::MatrixXd read_csv(const std::string& path, bool header = false) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::io, "cannot open '" + path + "' for reading");
  return parse_csv(in, header, path);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_rows(std::ostream& out, const Eigen::MatrixXd& m,
                       const std::vector<std::string>& header = {}) {
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  if (!header.empty()) out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

/// Complex columns are written as re,im pairs: column j becomes columns 2j and 2j+1.
inline Eigen::MatrixXd interleave(const Matrix& m) {
  Eigen::MatrixXd out(m.rows(), 2 * m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out.col(2 * j) = m.col(j).real();
    out.col(2 * j + 1) = m.col(j).imag();
  }
  return out;
}

inline Matrix deinterleave(const Eigen::MatrixXd& m) {
  dmdkit::detail::require(m.cols() % 2 == 0, ErrorCategory::dimension,
                          "deinterleave: odd number of columns");
  Matrix out(m.rows(), m.cols() / 2);
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j).real() = m.col(2 * j);
    out.col(j).imag() = m.col(2 * j + 1);
  }
  return out;
}

inline void write_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {}) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::io, "cannot open '" + path + "' for writing");
  write_rows(out, m, header);
  if (!out) throw Error(ErrorCategory::io, "write to '" + path + "' failed");
}

inline void write_complex_csv(const std::string& path, const Matrix& m) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    header.push_back("re" + std::to_string(j));
    header.push_back("im" + std::to_string(j));
  }
  write_csv(path, interleave(m), header);
}

}  // namespace dmdkit::io
