#pragma once

#include <dmdkit/types.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dmdkit {

/**
 * Seeded Gaussian stream.
 *
 * Bits come from std::mt19937_64, whose output sequence is fixed by the C++
 * standard. Uniforms take the top 53 bits; normals use the Box-Muller
 * transform, consuming two uniforms per pair of normals and returning the
 * cosine branch first. std::normal_distribution is avoided because its
 * algorithm is implementation-defined, and the streams here must be
 * bit-reproducible across toolchains.
 */
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// z_{k+1} = lambda z_k + n_k, n_k ~ N(0, sigma2); returns 1 x (steps + 1).
inline Eigen::MatrixXd gen_ar1(double lambda, double sigma2, Eigen::Index steps,
                               std::uint64_t seed, double z0 = 0.0) {
  detail::require(sigma2 >= 0.0, ErrorCategory::precondition, "gen_ar1: sigma2 must be >= 0");
  detail::require(steps >= 2, ErrorCategory::precondition, "gen_ar1: steps must be >= 2");
  GaussianStream rng(seed);
  const double sd = std::sqrt(sigma2);
  Eigen::MatrixXd z(1, steps + 1);
  z(0, 0) = z0;
  for (Eigen::Index k = 0; k < steps; ++k) z(0, k + 1) = lambda * z(0, k) + sd * rng.normal();
  return z;
}

/// z_k = cos(k theta) q, k = 0..steps.
inline Eigen::MatrixXd gen_standing_wave(double theta, const Eigen::VectorXd& q,
                                         Eigen::Index steps) {
  detail::require(q.size() >= 1 && q.norm() > 0.0, ErrorCategory::precondition,
                  "gen_standing_wave: q must be nonzero");
  detail::require(steps >= 2, ErrorCategory::precondition, "gen_standing_wave: steps must be >= 2");
  Eigen::MatrixXd z(q.size(), steps + 1);
  for (Eigen::Index k = 0; k <= steps; ++k)
    z.col(k) = std::cos(static_cast<double>(k) * theta) * q;
  return z;
}

/**
 * Rotation system u' = cos(t) u - sin(t) v, v' = sin(t) u + cos(t) v from
 * (u_0, v_0) = (q, 0), stacked as [u_k; v_k]. Evaluated in closed form
 * (u_k = cos(k t) q, v_k = sin(k t) q) so the u block matches
 * gen_standing_wave exactly.
 */
inline Eigen::MatrixXd gen_planar_rotation(double theta, const Eigen::VectorXd& q,
                                           Eigen::Index steps) {
  const Eigen::MatrixXd u = gen_standing_wave(theta, q, steps);
  const Eigen::Index n = q.size();
  Eigen::MatrixXd z(2 * n, steps + 1);
  z.topRows(n) = u;
  for (Eigen::Index k = 0; k <= steps; ++k)
    z.col(k).tail(n) = std::sin(static_cast<double>(k) * theta) * q;
  return z;
}

/// z_{k+1} = M z_k for k < steps.
inline Eigen::MatrixXd linear_trajectory(const Eigen::MatrixXd& m, const Eigen::VectorXd& z0,
                                         Eigen::Index steps) {
  detail::require(m.rows() == m.cols() && m.rows() == z0.size(), ErrorCategory::dimension,
                  "linear_trajectory: M and z0 disagree");
  Eigen::MatrixXd z(z0.size(), steps + 1);
  z.col(0) = z0;
  for (Eigen::Index k = 0; k < steps; ++k) z.col(k + 1) = m * z.col(k);
  return z;
}

/**
 * Damped planar oscillator with process noise:
 * z_{k+1} = radius * R(theta) z_k + n_k, n_k ~ N(0, noise_sd^2 I_2).
 * True eigenvalues are radius * e^{+-i theta}.
 */
inline Eigen::MatrixXd gen_noisy_rotation(double theta, double radius, double noise_sd,
                                          Eigen::Index steps, std::uint64_t seed,
                                          const Eigen::Vector2d& z0 = Eigen::Vector2d(1.0, 0.0)) {
  detail::require(noise_sd >= 0.0, ErrorCategory::precondition,
                  "gen_noisy_rotation: noise_sd must be >= 0");
  GaussianStream rng(seed);
  Eigen::Matrix2d m;
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  m *= radius;
  Eigen::MatrixXd z(2, steps + 1);
  z.col(0) = z0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double n1 = rng.normal(), n2 = rng.normal();
    z.col(k + 1) = m * z.col(k) + noise_sd * Eigen::Vector2d(n1, n2);
  }
  return z;
}

struct RandomLinearSystem {
  Eigen::MatrixXd m;
  Eigen::VectorXcd eigenvalues;  // by construction
  Eigen::MatrixXd snapshots;     // n x (steps + 1), random z_0
};

/**
 * Random real diagonalizable M = V D V^{-1} with spectral radius <= bound.
 * D mixes real eigenvalues and 2x2 rotation-scaling blocks; moduli are drawn
 * from [0.2, 1] * bound and angles from (0.1, pi - 0.1).
 */
inline RandomLinearSystem gen_random_linear(Eigen::Index n, Eigen::Index steps, double bound,
                                            std::uint64_t seed) {
  detail::require(n >= 1 && steps >= 2, ErrorCategory::precondition,
                  "gen_random_linear: need n >= 1 and steps >= 2");
  detail::require(bound > 0.0, ErrorCategory::precondition, "gen_random_linear: bound must be > 0");
  GaussianStream rng(seed);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  RandomLinearSystem sys;
  sys.eigenvalues.resize(n);
  for (Eigen::Index k = 0; k < n;) {
    const double radius = bound * (0.2 + 0.8 * rng.uniform());
    if (k + 1 < n && rng.uniform() < 0.5) {
      const double angle = 0.1 + (std::numbers::pi - 0.2) * rng.uniform();
      const double re = radius * std::cos(angle), im = radius * std::sin(angle);
      d(k, k) = re;
      d(k, k + 1) = -im;
      d(k + 1, k) = im;
      d(k + 1, k + 1) = re;
      sys.eigenvalues(k) = {re, im};
      sys.eigenvalues(k + 1) = {re, -im};
      k += 2;
    } else {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      d(k, k) = sign * radius;
      sys.eigenvalues(k) = sign * radius;
      k += 1;
    }
  }
  const Eigen::MatrixXd v = rng.normal_matrix(n, n);
  sys.m = v * d * v.inverse();
  const Eigen::VectorXd z0 = rng.normal_matrix(n, 1);
  sys.snapshots = linear_trajectory(sys.m, z0, steps);
  return sys;
}

struct TwoTimescaleSpec {
  double f_fast = 0.13;
  double f_slow = 0.02;
  double decay_fast = 0.0;  // continuous growth rates sigma (negative decays)
  double decay_slow = 0.0;
  double fast_amplitude = 1.0;
  double slow_amplitude = 1.0;
  Eigen::Index n = 8;
  Eigen::Index steps = 200;
  double dt = 1.0;
};

/**
 * Sum of two damped oscillations carried on fixed random spatial vectors:
 *   z(t) = sum_i c_i e^{sigma_i t} (a_i cos(2 pi f_i t) + b_i sin(2 pi f_i t)),
 * sampled at t = k dt. The sampled data obey a linear map with eigenvalues
 * e^{(sigma_i +- 2 pi i f_i) dt}. Refuses sampling that violates Nyquist for f_fast.
 * Strided pairs at P lose an oscillation when 2 P f_i dt is an integer: every
 * x column then sees it at the same phase (up to sign).
 */
inline Eigen::MatrixXd gen_two_timescale(const TwoTimescaleSpec& spec, std::uint64_t seed) {
  detail::require(spec.f_fast > spec.f_slow && spec.f_slow > 0.0, ErrorCategory::precondition,
                  "gen_two_timescale: need f_fast > f_slow > 0");
  detail::require(spec.dt > 0.0, ErrorCategory::precondition, "gen_two_timescale: dt must be > 0");
  detail::require(spec.f_fast * spec.dt < 0.5, ErrorCategory::precondition,
                  "gen_two_timescale: f_fast * dt = " + std::to_string(spec.f_fast * spec.dt) +
                      " violates the Nyquist limit 0.5; reduce dt");
  detail::require(spec.n >= 1 && spec.steps >= 2, ErrorCategory::precondition,
                  "gen_two_timescale: need n >= 1 and steps >= 2");
  GaussianStream rng(seed);
  const Eigen::MatrixXd shapes = rng.normal_matrix(spec.n, 4);  // a_fast b_fast a_slow b_slow
  Eigen::MatrixXd z(spec.n, spec.steps + 1);
  const double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index k = 0; k <= spec.steps; ++k) {
    const double t = static_cast<double>(k) * spec.dt;
    const double ef = spec.fast_amplitude * std::exp(spec.decay_fast * t);
    const double es = spec.slow_amplitude * std::exp(spec.decay_slow * t);
    z.col(k) = ef * (std::cos(two_pi * spec.f_fast * t) * shapes.col(0) +
                     std::sin(two_pi * spec.f_fast * t) * shapes.col(1)) +
               es * (std::cos(two_pi * spec.f_slow * t) * shapes.col(2) +
                     std::sin(two_pi * spec.f_slow * t) * shapes.col(3));
  }
  return z;
}

/// Eigenvalues e^{(sigma +- 2 pi i f) dt} of the oscillations carried by gen_two_timescale.
inline Eigen::VectorXcd two_timescale_eigenvalues(const TwoTimescaleSpec& spec) {
  const double two_pi = 2.0 * std::numbers::pi;
  Eigen::VectorXcd ev(4);
  ev(0) = std::exp(Complex(spec.decay_fast, two_pi * spec.f_fast) * spec.dt);
  ev(1) = std::conj(ev(0));
  ev(2) = std::exp(Complex(spec.decay_slow, two_pi * spec.f_slow) * spec.dt);
  ev(3) = std::conj(ev(2));
  return ev;
}

}  // namespace dmdkit
