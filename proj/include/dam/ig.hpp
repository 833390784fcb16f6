#pragma once

// The inverse Gaussian input process I = (I_t): law of an increment over
// elapsed time t, its Lévy measure and Laplace exponent, and exact sampling.
//
// Parameterization follows (μ, σ²): an increment over time t has density
//   p(t, z) = t / (σ √(2π z³)) · exp(-(μz - t)² / (2zσ²)),  z > 0,
// i.e. IG(mean t/μ, shape t²/σ²), with E I_t = t/μ and Var I_t = tσ²/μ³.

#include <cstdint>
#include <random>
#include <span>

namespace dam {

class IGParams {
 public:
  /// Throws DomainError unless both parameters are finite and positive.
  IGParams(double mu, double sigma2);

  double mu() const { return mu_; }
  double sigma2() const { return sigma2_; }
  double sigma() const { return sigma_; }

  /// Conventional IG(mean, shape) pair of the increment over time t.
  double increment_mean(double t) const { return t / mu_; }
  double increment_shape(double t) const { return t * t / sigma2_; }
  double increment_variance(double t) const { return t * sigma2_ / (mu_ * mu_ * mu_); }

 private:
  double mu_;
  double sigma2_;
  double sigma_;
};

/// Numerical integration policy shared by every quadrature in the library.
struct QuadConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double tail_mass_tol = 1e-13;
  int max_subdivisions = 4000;

  void validate() const;
};

/// Transition density p(t, z) of the increment z = y - x over time t.
double ig_density(const IGParams& p, double t, double z);
/// P(I_t <= z).
double ig_cdf(const IGParams& p, double t, double z);
/// P(I_t > z), accurate in the upper tail.
double ig_sf(const IGParams& p, double t, double z);
/// E[I_t ; I_t <= z].
double ig_partial_mean(const IGParams& p, double t, double z);

/// ψ(a) with E e^{-a I_t} = e^{-tψ(a)}; ψ(a) = (√(2aσ² + μ²) - μ)/σ².
double laplace_exponent(const IGParams& p, double a);
/// Density of the Lévy measure ν(dy) at jump size y > 0.
double levy_measure_density(const IGParams& p, double y);

/// Single-owner random stream. Streams are keyed by (root seed, index) so
/// work split across threads replays identically.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::uint64_t stream_index);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t root_seed, std::uint64_t stream_index);

/// One draw of I_t (Michael–Schucany–Haas transform).
double sample_increment(const IGParams& p, double t, RngStream& rng);
/// IG(mean, shape) draw in the conventional parameterization.
double sample_inverse_gaussian(double mean, double shape, RngStream& rng);
/// Fills `out` with independent draws of I_t using the batch kernel.
void sample_increments(const IGParams& p, double t, RngStream& rng, std::span<double> out);

}  // namespace dam
