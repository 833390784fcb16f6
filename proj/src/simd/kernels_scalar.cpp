#include <cmath>

#include "dam/simd/kernels.hpp"
#include "dam/special.hpp"
#include "scalar_math.hpp"

namespace dam::simd {
namespace {

void exp_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void erfc_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::erfc(x[i]);
}

void erfcx_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = special::erfc_scaled(x[i]);
}

void ig_density_scalar(double mu, double sigma2, const double* t, const double* z, double* out,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = ref::ig_density(mu, sigma2, t[i], z[i]);
}

void ig_cdf_parts_scalar(double mu, double sigma2, const double* t, const double* z,
                         double* lower, double* upper, double* reflected, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = ref::ig_cdf_parts(mu, sigma2, t[i], z[i]);
    lower[i] = p.lower;
    upper[i] = p.upper;
    reflected[i] = p.reflected;
  }
}

void resolvent_density_scalar(double mu, double sigma2, double alpha, const double* y,
                              double* out, std::size_t n) {
  const auto r = ref::resolvent_terms(mu, sigma2, alpha);
  for (std::size_t i = 0; i < n; ++i) out[i] = ref::resolvent_density(r, y[i]);
}

void resolvent_derivative_scalar(double mu, double sigma2, double alpha, const double* y,
                                 double* out, std::size_t n) {
  const auto r = ref::resolvent_terms(mu, sigma2, alpha);
  for (std::size_t i = 0; i < n; ++i) out[i] = ref::resolvent_derivative(r, y[i]);
}

void ig_transform_scalar(double mean, double shape, const double* normal, const double* uniform,
                         double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = ref::ig_transform(mean, shape, normal[i], uniform[i]);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar,
                                 "scalar",
                                 exp_scalar,
                                 erfc_scalar,
                                 erfcx_scalar,
                                 ig_density_scalar,
                                 ig_cdf_parts_scalar,
                                 resolvent_density_scalar,
                                 resolvent_derivative_scalar,
                                 ig_transform_scalar};
  return table;
}

}  // namespace dam::simd
