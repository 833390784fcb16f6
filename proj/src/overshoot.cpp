#include "dam/overshoot.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dam/passage.hpp"
#include "dam/special.hpp"
#include "dam/simd/kernels.hpp"
#include "simd/scalar_math.hpp"

namespace dam {
namespace {

constexpr std::size_t kMaxBatch = 21;

// 1 - x√π erfcx(x), which cancels badly for large x
double erfcx_defect(double x) {
  if (x > 8.0) {
    const double inv = 1.0 / (2.0 * x * x);
    double term = inv;
    double sum = inv;
    for (int n = 2; n < 40; ++n) {
      term *= -(2.0 * n - 1.0) * inv;
      sum += term;
      if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
  }
  return 1.0 - x * special::kSqrtPi * special::erfc_scaled(x);
}

void levy_density_batch(const IGParams& p, std::span<const double> r, std::span<double> out) {
  const double a2 = p.mu() * p.mu() / (2.0 * p.sigma2());
  const double c = special::kInvSqrt2Pi / p.sigma();
  for (std::size_t i = 0; i < r.size(); ++i)
    out[i] = r[i] > 0.0 ? c * std::exp(-a2 * r[i]) / (r[i] * std::sqrt(r[i])) : 0.0;
}

// ∫_0^L u(y) k(s - y) dy where u ~ y^{-1/2} at 0 and k peaks at s - y → 0.
double convolve_to_level(const quad::BatchIntegrand& f, double L, double s, const QuadConfig& cfg) {
  const double half = 0.5 * L;
  double total = quad::integrate_sqrt_left(f, 0.0, half, cfg).value;
  // y = L - w, graded from the near-singular end
  quad::BatchIntegrand g = [&f, L](std::span<const double> w, std::span<double> out) {
    std::array<double, kMaxBatch> y;
    for (std::size_t i = 0; i < w.size(); ++i) y[i] = L - w[i];
    f(std::span<const double>(y.data(), w.size()), out);
  };
  total += quad::integrate_graded(g, 0.0, half, std::min(half, s - L), cfg).value;
  return total;
}

}  // namespace

double levy_tail(const IGParams& p, double r) {
  require(r > 0.0, "Levy tail needs r > 0");
  const double a2 = p.mu() * p.mu() / (2.0 * p.sigma2());
  const double x = std::sqrt(a2 * r);
  return special::kInvSqrt2Pi / p.sigma() * 2.0 * std::exp(-a2 * r) / std::sqrt(r) *
         erfcx_defect(x);
}

OvershootLaw::OvershootLaw(IGParams params, double level, QuadConfig cfg)
    : params_(params), level_(level), cfg_(cfg) {
  require_finite(level, "level");
  require(level > 0.0, "overshoot level must be positive");
  cfg_.validate();
}

double OvershootLaw::tail_scale() const {
  const double a2 = params_.mu() * params_.mu() / (2.0 * params_.sigma2());
  return std::min(1.0 / a2, 10.0 * (1.0 + level_));
}

double OvershootLaw::levy(double alpha, double s) const {
  const ResolventDensity u(params_, alpha);
  quad::BatchIntegrand f = [&](std::span<const double> y, std::span<double> out) {
    std::array<double, kMaxBatch> r, nu;
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = s - y[i];
    levy_density_batch(params_, std::span<const double>(r.data(), y.size()),
                       std::span<double>(nu.data(), y.size()));
    u.evaluate(y, out);
    for (std::size_t i = 0; i < y.size(); ++i) out[i] *= nu[i];
  };
  return convolve_to_level(f, level_, s, cfg_);
}

double OvershootLaw::factorization(double alpha, double s) const {
  const ResolventDensity u0(params_, 0.0);
  const ResolventDensity ua(params_, alpha);
  const double L = level_;
  quad::BatchIntegrand f = [&](std::span<const double> y, std::span<double> out) {
    std::array<double, kMaxBatch> back, dv;
    for (std::size_t i = 0; i < y.size(); ++i) back[i] = s - y[i];
    u0.evaluate(std::span<const double>(back.data(), y.size()), out);
    ua.evaluate_derivative(y, std::span<double>(dv.data(), y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) out[i] *= dv[i];
  };
  const double conv = quad::integrate_sqrt_right(f, L, s, cfg_).value;
  const double bracket = ua(L) * u0(s - L) + conv - params_.mu() * ua(s);
  return alpha * ua(s) + 2.0 / params_.sigma2() * bracket;
}

double OvershootLaw::pdf(double s) const {
  require_finite(s, "s");
  require(s > level_, "overshoot density needs s > level");
  return factorization(0.0, s);
}

double OvershootLaw::pdf_levy(double s) const {
  require_finite(s, "s");
  require(s > level_, "overshoot density needs s > level");
  return levy(0.0, s);
}

double OvershootLaw::sf(double s) const {
  require_finite(s, "s");
  if (s <= level_) return 1.0;
  const ResolventDensity u(params_, 0.0);
  quad::BatchIntegrand f = [&](std::span<const double> y, std::span<double> out) {
    u.evaluate(y, out);
    for (std::size_t i = 0; i < y.size(); ++i) out[i] *= levy_tail(params_, s - y[i]);
  };
  return std::min(1.0, convolve_to_level(f, level_, s, cfg_));
}

double OvershootLaw::mean() const { return mean_w_lambda(params_, 0.0, level_) / params_.mu(); }

double OvershootLaw::landing_kernel(double alpha, double s, LandingRoute route) const {
  require_finite(alpha, "alpha");
  require(alpha >= 0.0, "alpha must be >= 0");
  require_finite(s, "s");
  require(s > level_, "landing kernel needs s > level");
  return route == LandingRoute::levy ? levy(alpha, s) : factorization(alpha, s);
}

double OvershootLaw::joint_density(double t, double s, JointReading reading) const {
  require_finite(t, "t");
  require_finite(s, "s");
  require(t > 0.0, "joint density needs t > 0");
  if (s <= level_) return 0.0;
  const double mu = params_.mu();
  const double s2 = params_.sigma2();
  const double L = level_;
  const ResolventDensity u0(params_, 0.0);

  auto dt_p = [&](double z) {
    const double pz = simd::ref::ig_density(mu, s2, t, z);
    return pz * (1.0 / t + (mu * z - t) / (z * s2));
  };
  quad::BatchIntegrand f = [&](std::span<const double> y, std::span<double> out) {
    std::array<double, kMaxBatch> back, tt, py;
    for (std::size_t i = 0; i < y.size(); ++i) {
      back[i] = s - y[i];
      tt[i] = t;
    }
    u0.evaluate(std::span<const double>(back.data(), y.size()), out);
    simd::active().ig_density(mu, s2, tt.data(), y.data(), py.data(), y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double z = y[i];
      const double dz = py[i] * (-1.5 / z - (mu * mu * z * z - t * t) / (2.0 * z * z * s2));
      out[i] *= dz;
    }
  };
  const double conv = quad::integrate_sqrt_right(f, L, s, cfg_).value;
  const double coeff =
      reading == JointReading::transition_density ? simd::ref::ig_density(mu, s2, t, L) : u0(L);
  const double ps = simd::ref::ig_density(mu, s2, t, s);
  return dt_p(s) + 2.0 / s2 * (coeff * u0(s - L) + conv - mu * ps);
}

double OvershootLaw::joint_transform(double alpha, double beta) const {
  require_finite(alpha, "alpha");
  require_finite(beta, "beta");
  require(alpha >= 0.0 && beta >= 0.0, "transform arguments must be >= 0");
  if (alpha == 0.0 && beta == 0.0) return 1.0;
  const ResolventDensity u(params_, alpha);
  return (alpha + laplace_exponent(params_, beta)) * tail_integral(u, beta, level_, cfg_);
}

double OvershootLaw::expect_batch(const quad::BatchIntegrand& h, double alpha,
                                  std::span<const double> breaks, LandingRoute route) const {
  require(alpha >= 0.0, "alpha must be >= 0");
  quad::BatchIntegrand f = [&](std::span<const double> s, std::span<double> out) {
    h(s, out);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (out[i] != 0.0) out[i] *= landing_kernel(alpha, s[i], route);
  };
  std::vector<double> b;
  // a break within rounding of the level would leave a panel too thin for
  // the square-root substitution to resolve
  const double floor = level_ + 1e-9 * (1.0 + level_);
  for (double v : breaks)
    if (v > floor) b.push_back(v);
  if (route == LandingRoute::levy) return quad::integrate_with_breaks(f, level_, b, tail_scale(), cfg_, true).value;

  // The inverted form is a difference of O(1) terms with an absolute floor
  // near 1e-15, which keeps the open-ended tail search from settling. Stop
  // where the landing law itself has less than tail_mass_tol left.
  double cut = level_ + tail_scale();
  while (sf(cut) > cfg_.tail_mass_tol) cut = level_ + 2.0 * (cut - level_);
  b.erase(std::remove_if(b.begin(), b.end(), [cut](double v) { return v >= cut; }), b.end());
  b.push_back(cut);
  double total = 0.0;
  double lo = level_;
  for (double hi : b) {
    total += (lo == level_) ? quad::integrate_sqrt_left(f, lo, hi, cfg_).value : quad::integrate(f, lo, hi, cfg_).value;
    lo = hi;
  }
  return total;
}

double OvershootLaw::expect(const std::function<double(double)>& h, double alpha,
                            std::span<const double> breaks, LandingRoute route) const {
  return expect_batch(
      [&h](std::span<const double> s, std::span<double> out) {
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = h(s[i]);
      },
      alpha, breaks, route);
}

}  // namespace dam
