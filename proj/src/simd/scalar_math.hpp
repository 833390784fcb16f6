#pragma once

// Reference formulas shared by the scalar kernel table and the scalar
// library API. The AVX2 kernels reproduce these elementwise.

#include <cmath>

#include "dam/special.hpp"

namespace dam::simd::ref {

using special::kInvSqrt2Pi;
using special::kSqrt2;
using special::kSqrtPi;

inline double ig_density(double mu, double sigma2, double t, double z) {
  if (!(z > 0.0)) return 0.0;
  const double d = mu * z - t;
  const double q = d * d / (2.0 * sigma2 * z);
  if (q > 745.0) return 0.0;
  return t * kInvSqrt2Pi / (std::sqrt(sigma2) * z * std::sqrt(z)) * std::exp(-q);
}

struct CdfParts {
  double lower;      // Φ(a)
  double upper;      // Φ(-a)
  double reflected;  // e^{2tμ/σ²} Φ(-b)
};

inline CdfParts ig_cdf_parts(double mu, double sigma2, double t, double z) {
  if (!(z > 0.0)) return {0.0, 1.0, 0.0};
  const double sz = std::sqrt(sigma2 * z);
  const double a = (mu * z - t) / sz;
  const double b = (mu * z + t) / sz;
  const double tail = 0.5 * std::erfc(std::fabs(a) / kSqrt2);
  const double refl = 0.5 * special::exp_neg_square(a / kSqrt2) * special::erfc_scaled(b / kSqrt2);
  if (a >= 0.0) return {1.0 - tail, tail, refl};
  return {tail, 1.0 - tail, refl};
}

// e^{Ay} erfc(v) with v = k√y, written so neither factor overflows.
// base = e^{-μ²y/(2σ²)} = e^{(A - k²)y}.
inline double scaled_tail(double v, double base, double ay) {
  if (v >= 0.0) return base * special::erfc_scaled(v);
  return 2.0 * std::exp(ay) - base * special::erfc_scaled(-v);
}

struct ResolventTerms {
  double sigma;
  double a2;  // μ²/(2σ²)
  double c;   // (μ - ασ²)/2
  double k;   // (ασ² - μ)/(σ√2)
  double A;   // α(ασ²/2 - μ)
};

inline ResolventTerms resolvent_terms(double mu, double sigma2, double alpha) {
  const double sigma = std::sqrt(sigma2);
  return {sigma, mu * mu / (2.0 * sigma2), 0.5 * (mu - alpha * sigma2),
          (alpha * sigma2 - mu) / (sigma * kSqrt2), alpha * (0.5 * alpha * sigma2 - mu)};
}

inline double resolvent_density(const ResolventTerms& r, double y) {
  if (!(y > 0.0)) return 0.0;
  const double sy = std::sqrt(y);
  const double base = std::exp(-r.a2 * y);
  const double first = r.sigma * kInvSqrt2Pi / sy * base;
  return first + r.c * scaled_tail(r.k * sy, base, r.A * y);
}

inline double resolvent_derivative(const ResolventTerms& r, double y) {
  if (!(y > 0.0)) return 0.0;
  const double sy = std::sqrt(y);
  const double base = std::exp(-r.a2 * y);
  const double singular =
      -r.sigma * kInvSqrt2Pi * (0.5 / (y * sy) + r.a2 / sy) - r.c * r.k / (kSqrtPi * sy);
  return base * singular + r.c * r.A * scaled_tail(r.k * sy, base, r.A * y);
}

inline double ig_transform(double mean, double shape, double normal, double uniform) {
  const double y = normal * normal;
  const double q = mean * y / (2.0 * shape);
  const double x1 = mean / (1.0 + q + std::sqrt(q * (2.0 + q)));
  return uniform * (mean + x1) <= mean ? x1 : mean * mean / x1;
}

}  // namespace dam::simd::ref
