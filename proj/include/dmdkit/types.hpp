#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace dmdkit {

using Complex = std::complex<double>;

/// Dense complex matrix, column-major. Real data is carried with zero imaginary parts.
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class ErrorCategory {
  dimension,     // shapes do not agree
  rank_zero,     // numerically zero data where a nonzero matrix is required
  precondition,  // input violates a documented requirement
  numerical,     // a kernel failed its residual contract
  parse,         // malformed text input
  io,            // file could not be opened or written
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::dimension: return "dimension";
    case ErrorCategory::rank_zero: return "rank-zero";
    case ErrorCategory::precondition: return "precondition";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

namespace detail {

inline void require(bool cond, ErrorCategory cat, const std::string& msg) {
  if (!cond) throw Error(cat, msg);
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto v = m(i, j);
      if (!std::isfinite(std::real(v)) || !std::isfinite(std::imag(v))) return false;
    }
  return true;
}

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  require(all_finite(m), ErrorCategory::precondition,
          std::string(what) + ": non-finite entry");
}

template <class Derived>
bool is_real(const Eigen::MatrixBase<Derived>& m) {
  if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m(i, j).imag() != 0.0) return false;
  }
  return true;
}

/// Lift real or complex Eigen data to the library's complex matrix type.
template <class Derived>
Matrix to_complex(const Eigen::MatrixBase<Derived>& m) {
  return m.template cast<Complex>();
}

}  // namespace detail
}  // namespace dmdkit
