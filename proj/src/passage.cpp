#include "dam/passage.hpp"

#include <cmath>

#include "dam/special.hpp"
#include "simd/scalar_math.hpp"

namespace dam {

void Policy::validate() const {
  require_finite(lambda, "lambda");
  require_finite(tau, "tau");
  require_finite(M, "M");
  require(tau >= 0.0, "tau must be >= 0");
  require(tau < lambda, "policy needs tau < lambda");
  require(M > 0.0, "release rate M must be positive");
}

double eta(const IGParams& p, double M, double alpha) {
  require_finite(M, "M");
  require_finite(alpha, "alpha");
  require(M > 0.0, "release rate M must be positive");
  require(alpha >= 0.0, "alpha must be >= 0");
  const double s2 = p.sigma2();
  const double a = 1.0 - M * p.mu();
  const double root = std::sqrt(2.0 * alpha * M * s2 + a * a);
  // a + root loses everything to cancellation when a < 0
  const double num = a >= 0.0 ? a + root : 2.0 * alpha * M * s2 / (root - a);
  return alpha / M + num / (M * M * s2);
}

double eta_residual(const IGParams& p, double M, double alpha, double value) {
  return M * value - alpha - laplace_exponent(p, value);
}

namespace {

void check_fill(double x, double lambda) {
  require_finite(x, "x");
  require_finite(lambda, "lambda");
  require(x <= lambda, "fill-phase start must satisfy x <= lambda");
}

double lt_w_lambda_raw(const IGParams& p, double L, double alpha) {
  const double s2 = p.sigma2();
  const double mu = p.mu();
  const auto r = simd::ref::resolvent_terms(mu, s2, alpha);
  const double sl = std::sqrt(L);
  const double base = std::exp(-r.a2 * L);
  const double e = simd::ref::scaled_tail(r.k * sl, base, r.A * L);
  const double den = alpha * s2 - 2.0 * mu;
  return ((alpha * s2 - mu) * e - mu * std::erfc(sl * mu / (p.sigma() * special::kSqrt2))) / den;
}

void check_release(double M, double x, double tau) {
  require_finite(x, "x");
  require_finite(tau, "tau");
  require_finite(M, "M");
  require(M > 0.0, "release rate M must be positive");
  require(x >= tau, "release-phase start must satisfy x >= tau");
}

}  // namespace

double lt_w_lambda(const IGParams& p, double x, double lambda, double alpha) {
  check_fill(x, lambda);
  require_finite(alpha, "alpha");
  require(alpha >= 0.0, "alpha must be >= 0");
  const double L = lambda - x;
  if (L == 0.0 || alpha == 0.0) return 1.0;
  // removable pole at ασ² = 2μ: interpolate across it
  const double pole = 2.0 * p.mu() / p.sigma2();
  constexpr double kDelta = 1e-5;
  if (std::fabs(alpha - pole) < kDelta * pole) {
    const double lo = pole * (1.0 - kDelta);
    const double hi = pole * (1.0 + kDelta);
    const double w = (alpha - lo) / (hi - lo);
    return (1.0 - w) * lt_w_lambda_raw(p, L, lo) + w * lt_w_lambda_raw(p, L, hi);
  }
  return lt_w_lambda_raw(p, L, alpha);
}

double cdf_w_lambda(const IGParams& p, double x, double lambda, double t) {
  check_fill(x, lambda);
  require_finite(t, "t");
  require(t >= 0.0, "time must be >= 0");
  const double L = lambda - x;
  if (L == 0.0) return 1.0;
  if (t == 0.0) return 0.0;
  // {W_λ ≤ t} = {I_t ≥ λ - x}; I_t has no atoms
  return ig_sf(p, t, L);
}

double cdf_w_lambda_unscaled(const IGParams& p, double x, double lambda, double t) {
  check_fill(x, lambda);
  require_finite(t, "t");
  require(t >= 0.0, "time must be >= 0");
  const double L = lambda - x;
  const double s = std::sqrt(2.0 * p.sigma2());
  const double a = (L * p.mu() - t) / s;
  const double b = (L * p.mu() + t) / s;
  const double refl = std::exp(2.0 * p.mu() * t / p.sigma2() - b * b) * special::erfc_scaled(b);
  return 0.5 * std::erfc(a) - 0.5 * refl;
}

double mean_w_lambda(const IGParams& p, double x, double lambda) {
  check_fill(x, lambda);
  const double L = lambda - x;
  if (L == 0.0) return 0.0;
  const double mu = p.mu();
  const double s = p.sigma();
  const double sl = std::sqrt(L);
  return 0.5 * L * mu + s * sl * special::normal_pdf(sl * mu / s) +
         (L * mu * mu + p.sigma2()) / (2.0 * mu) * std::erf(sl * mu / (s * special::kSqrt2));
}

double lt_w_tau_star(const IGParams& p, double M, double x, double tau, double alpha) {
  check_release(M, x, tau);
  if (x == tau) return 1.0;
  return std::exp(-(x - tau) * eta(p, M, alpha));
}

double prob_w_tau_star_finite(const IGParams& p, double M, double x, double tau) {
  return lt_w_tau_star(p, M, x, tau, 0.0);
}

double pdf_w_tau_star(const IGParams& p, double M, double x, double tau, double t) {
  check_release(M, x, tau);
  require_finite(t, "t");
  require(t >= 0.0, "time must be >= 0");
  const double d = x - tau;
  const double s = M * t - d;
  if (d == 0.0 || !(s > 0.0)) return 0.0;
  const double e = (M * p.mu() - 1.0) * t - p.mu() * d;
  return d * special::kInvSqrt2Pi / (p.sigma() * s * std::sqrt(s)) *
         std::exp(-e * e / (2.0 * s * p.sigma2()));
}

MeanVariance mean_var_w_tau_star(const IGParams& p, double M, double x, double tau) {
  check_release(M, x, tau);
  const double d = x - tau;
  if (d == 0.0) return {0.0, 0.0};
  const double drift = p.mu() * M - 1.0;
  if (drift <= 0.0) return {ExtendedReal::infinite(), ExtendedReal::infinite()};
  return {d * p.mu() / drift, d * p.sigma2() / (drift * drift * drift)};
}

}  // namespace dam
