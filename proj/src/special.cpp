#include "dam/special.hpp"

#include <cmath>
#include <limits>

namespace dam::special {

double normal_pdf(double x) { return kInvSqrt2Pi * exp_neg_square(x / kSqrt2); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double erf(double x) { return std::erf(x); }

double erfc(double x) { return std::erfc(x); }

double exp_neg_square(double x) {
  const double p = x * x;
  const double lo = std::fma(x, x, -p);
  return std::exp(-p) * (1.0 - lo);
}

namespace {

// Asymptotic series, used where erfc underflows in extended precision.
double erfcx_asymptotic(double x) {
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < 60; ++n) {
    term *= -(2.0 * n - 1.0) * inv2x2;
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return sum / (x * kSqrtPi);
}

}  // namespace

double erfc_scaled(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    if (x < -26.64) return std::numeric_limits<double>::infinity();
    const long double lx = x;
    return static_cast<double>(2.0L * std::exp(lx * lx)) - erfc_scaled(-x);
  }
  if (x < 26.0) {
    const long double lx = x;
    return static_cast<double>(std::exp(lx * lx) * std::erfc(lx));
  }
  if (std::isinf(x)) return 0.0;
  return erfcx_asymptotic(x);
}

}  // namespace dam::special
