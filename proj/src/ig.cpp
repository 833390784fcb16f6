#include "dam/ig.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dam/common.hpp"
#include "dam/simd/kernels.hpp"
#include "simd/scalar_math.hpp"

namespace dam {

IGParams::IGParams(double mu, double sigma2) : mu_(mu), sigma2_(sigma2), sigma_(std::sqrt(sigma2)) {
  require_finite(mu, "mu");
  require_finite(sigma2, "sigma2");
  require(mu > 0.0, "mu must be positive");
  require(sigma2 > 0.0, "sigma2 must be positive");
}

void QuadConfig::validate() const {
  require(rel_tol > 0.0 && rel_tol < 1.0, "quadrature rel_tol must lie in (0, 1)");
  require(abs_tol > 0.0 && abs_tol < 1.0, "quadrature abs_tol must lie in (0, 1)");
  require(tail_mass_tol > 0.0 && tail_mass_tol < 1.0, "quadrature tail_mass_tol must lie in (0, 1)");
  require(max_subdivisions >= 1, "quadrature max_subdivisions must be >= 1");
}

namespace {

void check_time(double t, double z) {
  require_finite(t, "t");
  require_finite(z, "z");
  require(t > 0.0, "elapsed time t must be positive");
}

}  // namespace

double ig_density(const IGParams& p, double t, double z) {
  check_time(t, z);
  return simd::ref::ig_density(p.mu(), p.sigma2(), t, z);
}

double ig_cdf(const IGParams& p, double t, double z) {
  check_time(t, z);
  const auto parts = simd::ref::ig_cdf_parts(p.mu(), p.sigma2(), t, z);
  return std::min(1.0, parts.lower + parts.reflected);
}

double ig_sf(const IGParams& p, double t, double z) {
  check_time(t, z);
  const auto parts = simd::ref::ig_cdf_parts(p.mu(), p.sigma2(), t, z);
  return std::max(0.0, parts.upper - parts.reflected);
}

double ig_partial_mean(const IGParams& p, double t, double z) {
  check_time(t, z);
  const auto parts = simd::ref::ig_cdf_parts(p.mu(), p.sigma2(), t, z);
  return std::max(0.0, p.increment_mean(t) * (parts.lower - parts.reflected));
}

double laplace_exponent(const IGParams& p, double a) {
  require_finite(a, "transform argument");
  require(a >= 0.0, "Laplace exponent needs a >= 0");
  return 2.0 * a / (std::sqrt(2.0 * a * p.sigma2() + p.mu() * p.mu()) + p.mu());
}

double levy_measure_density(const IGParams& p, double y) {
  require_finite(y, "jump size");
  require(y > 0.0, "Levy measure density needs y > 0");
  return special::kInvSqrt2Pi / p.sigma() * std::exp(-y * p.mu() * p.mu() / (2.0 * p.sigma2())) /
         (y * std::sqrt(y));
}

std::uint64_t mix_seed(std::uint64_t root_seed, std::uint64_t stream_index) {
  // splitmix64 finalizer over a counter derived from the pair
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(root_seed ^ mix(stream_index + 0x632be59bd9b4e019ULL));
}

RngStream::RngStream(std::uint64_t root_seed, std::uint64_t stream_index)
    : engine_(mix_seed(root_seed, stream_index)) {}

double RngStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double sample_inverse_gaussian(double mean, double shape, RngStream& rng) {
  const double n = rng.normal();
  const double u = rng.uniform();
  return simd::ref::ig_transform(mean, shape, n, u);
}

double sample_increment(const IGParams& p, double t, RngStream& rng) {
  require_finite(t, "t");
  require(t > 0.0, "elapsed time t must be positive");
  return sample_inverse_gaussian(p.increment_mean(t), p.increment_shape(t), rng);
}

void sample_increments(const IGParams& p, double t, RngStream& rng, std::span<double> out) {
  require(t > 0.0, "elapsed time t must be positive");
  constexpr std::size_t kBlock = 1024;
  std::vector<double> normals(kBlock), uniforms(kBlock);
  for (std::size_t off = 0; off < out.size(); off += kBlock) {
    const std::size_t n = std::min(kBlock, out.size() - off);
    for (std::size_t i = 0; i < n; ++i) {
      normals[i] = rng.normal();
      uniforms[i] = rng.uniform();
    }
    simd::active().ig_transform(p.increment_mean(t), p.increment_shape(t), normals.data(),
                                uniforms.data(), out.data() + off, n);
  }
}

}  // namespace dam
