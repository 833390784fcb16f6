#include "dam/resolvents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "dam/quadrature.hpp"
#include "dam/simd/kernels.hpp"
#include "dam/special.hpp"
#include "simd/scalar_math.hpp"

namespace dam {

ResolventDensity::ResolventDensity(IGParams params, double alpha) : params_(params), alpha_(alpha) {
  require_finite(alpha, "alpha");
  require(alpha >= 0.0, "alpha must be >= 0");
}

double ResolventDensity::operator()(double y) const {
  require_finite(y, "y");
  require(y > 0.0, "resolvent density needs y > 0");
  const auto r = simd::ref::resolvent_terms(params_.mu(), params_.sigma2(), alpha_);
  const double u = simd::ref::resolvent_density(r, y);
  if (!flipped_) return u;
  const double first = r.sigma * special::kInvSqrt2Pi / std::sqrt(y) * std::exp(-r.a2 * y);
  return 2.0 * first - u;
}

double ResolventDensity::derivative(double y) const {
  require_finite(y, "y");
  require(y > 0.0, "resolvent derivative needs y > 0");
  const auto r = simd::ref::resolvent_terms(params_.mu(), params_.sigma2(), alpha_);
  const double du = simd::ref::resolvent_derivative(r, y);
  if (!flipped_) return du;
  const double sy = std::sqrt(y);
  const double dfirst = -r.sigma * special::kInvSqrt2Pi * std::exp(-r.a2 * y) *
                        (0.5 / (y * sy) + r.a2 / sy);
  return 2.0 * dfirst - du;
}

void ResolventDensity::evaluate(std::span<const double> y, std::span<double> out) const {
  simd::active().resolvent_density(params_.mu(), params_.sigma2(), alpha_, y.data(), out.data(),
                                   y.size());
  if (!flipped_) return;
  const double a2 = params_.mu() * params_.mu() / (2.0 * params_.sigma2());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    const double first = params_.sigma() * special::kInvSqrt2Pi / std::sqrt(y[i]) * std::exp(-a2 * y[i]);
    out[i] = 2.0 * first - out[i];
  }
}

void ResolventDensity::evaluate_derivative(std::span<const double> y, std::span<double> out) const {
  if (flipped_) {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] > 0.0 ? derivative(y[i]) : 0.0;
    return;
  }
  simd::active().resolvent_derivative(params_.mu(), params_.sigma2(), alpha_, y.data(), out.data(),
                                      y.size());
}

ExtendedReal ResolventDensity::transform(double beta) const {
  require_finite(beta, "beta");
  require(beta >= 0.0, "beta must be >= 0");
  if (alpha_ == 0.0 && beta == 0.0) return ExtendedReal::infinite();
  const double s2 = params_.sigma2();
  return s2 / (alpha_ * s2 + laplace_exponent(params_, beta) * s2);
}

double ResolventDensity::decay_rate(double beta) const {
  const double mu = params_.mu();
  const double s2 = params_.sigma2();
  const double a2 = mu * mu / (2.0 * s2);
  if (alpha_ * s2 < mu) return beta + alpha_ * (mu - 0.5 * alpha_ * s2);
  return beta + a2;
}

ResolventDensity ResolventDensity::with_sign_flip() const {
  ResolventDensity r = *this;
  r.flipped_ = !flipped_;
  return r;
}

double u_alpha(const ResolventDensity& res, double y) { return res(y); }
double u_alpha_prime(const ResolventDensity& res, double y) { return res.derivative(y); }

namespace {

constexpr std::size_t kMaxBatch = 21;

double tail_scale(double rate, double fallback) {
  if (rate > 0.0 && std::isfinite(1.0 / rate)) return std::min(1.0 / rate, fallback);
  return fallback;
}

}  // namespace

double tail_integral(const ResolventDensity& res, double beta, double from, const QuadConfig& cfg) {
  require_finite(from, "from");
  require(from >= 0.0, "tail integral needs from >= 0");
  require(beta >= 0.0, "beta must be >= 0");
  const double rate = res.decay_rate(beta);
  if (!(rate > 0.0)) throw DivergenceError("resolvent integral diverges at alpha = beta = 0");
  quad::BatchIntegrand f = [&res, beta](std::span<const double> y, std::span<double> out) {
    res.evaluate(y, out);
    if (beta > 0.0)
      for (std::size_t i = 0; i < y.size(); ++i) out[i] *= std::exp(-beta * y[i]);
  };
  const double scale = 1.0 / rate;
  if (from == 0.0) {
    // the first panel carries the 1/√y singularity
    return quad::integrate_to_infinity(f, 0.0, std::min(scale, 1.0), cfg, true).value;
  }
  return quad::integrate_to_infinity(f, from, scale, cfg, false).value;
}

double transform_by_quadrature(const ResolventDensity& res, double beta, const QuadConfig& cfg) {
  return tail_integral(res, beta, 0.0, cfg);
}

double integrate_resolvent(const ResolventDensity& res, const PenaltyFn& g, double from, double to,
                           const QuadConfig& cfg) {
  require_finite(from, "from");
  require_finite(to, "to");
  require(from >= 0.0 && from <= to, "resolvent integral needs 0 <= from <= to");
  require(std::isfinite(g.bound()), "penalty must be bounded");
  if (to == from || g.is_zero()) return 0.0;
  quad::BatchIntegrand f = [&res, &g, from](std::span<const double> y, std::span<double> out) {
    res.evaluate(y, out);
    if (g.is_constant()) {
      const double c = g.constant_value();
      for (double& v : out) v *= c;
    } else {
      for (std::size_t i = 0; i < y.size(); ++i) out[i] *= g(from + y[i]);
    }
  };
  std::vector<double> edges;
  for (double k : g.breakpoints(from, to)) edges.push_back(k - from);
  edges.push_back(to - from);
  quad::Result total;
  double lo = 0.0;
  for (double hi : edges) {
    if (!(hi > lo)) continue;
    total += lo == 0.0 ? quad::integrate_sqrt_left(f, lo, hi, cfg) : quad::integrate(f, lo, hi, cfg);
    lo = hi;
  }
  return total.value;
}

KilledResolvent::KilledResolvent(IGParams params, Policy policy, double alpha, QuadConfig cfg)
    : params_(params), policy_(policy), alpha_(alpha), eta_(0.0), cfg_(cfg) {
  policy_.validate();
  cfg_.validate();
  require_finite(alpha, "alpha");
  require(alpha >= 0.0, "alpha must be >= 0");
  if (alpha == 0.0 && params_.mu() * policy_.M <= 1.0)
    throw DivergenceError("undiscounted release-phase occupation is infinite when mu*M <= 1");
  eta_ = dam::eta(params_, policy_.M, alpha_);
}

double KilledResolvent::p_star(double z) const {
  require_finite(z, "z");
  const double M = policy_.M;
  const double mu = params_.mu();
  const double s2 = params_.sigma2();
  const double t0 = std::max(0.0, -z / M);
  quad::BatchIntegrand f = [this, z, M, mu, s2](std::span<const double> t, std::span<double> out) {
    std::array<double, kMaxBatch> level;
    for (std::size_t i = 0; i < t.size(); ++i) level[i] = z + M * t[i];
    simd::active().ig_density(mu, s2, t.data(), level.data(), out.data(), t.size());
    if (alpha_ > 0.0)
      for (std::size_t i = 0; i < t.size(); ++i) out[i] *= std::exp(-alpha_ * t[i]);
  };
  const double drift = mu * M - 1.0;
  const double rate = alpha_ + drift * drift / (2.0 * M * s2);
  const double scale = tail_scale(rate, 1.0 + mu * std::fabs(z));
  return quad::integrate_to_infinity(f, t0, scale, cfg_, z == 0.0).value;
}

double KilledResolvent::density(double x, double y) const {
  require_finite(x, "x");
  require_finite(y, "y");
  require(x >= policy_.tau, "killed resolvent needs x >= tau");
  require(y > policy_.tau, "killed resolvent needs y > tau");
  if (x == policy_.tau) return 0.0;
  const double phi = std::exp(-(x - policy_.tau) * eta_);
  return p_star(y - x) - phi * p_star(y - policy_.tau);
}

double KilledResolvent::occupation(const PenaltyFn& g, double x) const {
  require(std::isfinite(g.bound()), "penalty must be bounded");
  const auto pieces = g.pieces(policy_.tau, std::numeric_limits<double>::infinity());
  return occupation(pieces, x);
}

namespace {

// E[(a + bY); lo < Y ≤ hi] summed over pieces, Y = c + I_t.
struct PieceExpectation {
  double mu, s2;
  std::span<const LinearPiece> pieces;
  std::vector<double> edges;  // finite piece edges, sorted unique

  double operator()(double t, double c, std::span<simd::ref::CdfParts> parts) const {
    for (std::size_t e = 0; e < edges.size(); ++e)
      parts[e] = simd::ref::ig_cdf_parts(mu, s2, t, edges[e] - c);
    const double m = t / mu;
    auto find = [&](double v) -> const simd::ref::CdfParts* {
      if (!std::isfinite(v)) return nullptr;
      const auto it = std::lower_bound(edges.begin(), edges.end(), v);
      return &parts[static_cast<std::size_t>(it - edges.begin())];
    };
    double sum = 0.0;
    for (const LinearPiece& pc : pieces) {
      const simd::ref::CdfParts* lo = find(pc.lo);
      const simd::ref::CdfParts* hi = find(pc.hi);
      const double lo_up = lo->upper + lo->reflected;  // (upper partial mean)/m at lo
      const double lo_sf = lo->upper - lo->reflected;
      double mass, pmean;
      if (hi == nullptr) {
        mass = lo_sf;
        pmean = m * lo_up;
      } else if (lo->lower >= 0.5) {
        // both edges in the upper half: difference of survival functions
        mass = lo_sf - (hi->upper - hi->reflected);
        pmean = m * (lo_up - (hi->upper + hi->reflected));
      } else {
        mass = (hi->lower + hi->reflected) - (lo->lower + lo->reflected);
        pmean = m * ((hi->lower - hi->reflected) - (lo->lower - lo->reflected));
      }
      sum += (pc.intercept + pc.slope * c) * mass + pc.slope * pmean;
    }
    return sum;
  }
};

}  // namespace

double KilledResolvent::occupation(std::span<const LinearPiece> pieces, double x) const {
  require_finite(x, "x");
  const double tau = policy_.tau;
  require(x >= tau, "killed occupation needs x >= tau");
  if (x == tau || pieces.empty()) return 0.0;
  const double M = policy_.M;
  const double mu = params_.mu();
  const double s2 = params_.sigma2();

  PieceExpectation expect{mu, s2, pieces, {}};
  for (const LinearPiece& pc : pieces) {
    require(pc.lo >= tau && pc.hi > pc.lo, "occupation pieces must lie in (tau, inf)");
    expect.edges.push_back(pc.lo);
    if (std::isfinite(pc.hi)) expect.edges.push_back(pc.hi);
  }
  std::sort(expect.edges.begin(), expect.edges.end());
  expect.edges.erase(std::unique(expect.edges.begin(), expect.edges.end()), expect.edges.end());

  const double phi = std::exp(-(x - tau) * eta_);
  quad::BatchIntegrand f = [&, this](std::span<const double> t, std::span<double> out) {
    std::vector<simd::ref::CdfParts> parts(expect.edges.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double gx = expect(t[i], x - M * t[i], parts);
      const double gt = expect(t[i], tau - M * t[i], parts);
      double v = gx - phi * gt;
      if (alpha_ > 0.0) v *= std::exp(-alpha_ * t[i]);
      out[i] = v;
    }
  };

  std::vector<double> breaks;
  for (double e : expect.edges)
    if (e < x) breaks.push_back((x - e) / M);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [](double b) { return !(b > 0.0); }),
               breaks.end());

  const double drift = mu * M - 1.0;
  const double rate = alpha_ + drift * drift / (2.0 * M * s2);
  const double span = breaks.empty() ? (x - tau) / M : breaks.back();
  const double scale = tail_scale(rate, std::max(span, 1e-3) + 1.0);
  return quad::integrate_with_breaks(f, 0.0, breaks, scale, cfg_, true).value;
}

double KilledResolvent::occupation_by_density(const PenaltyFn& g, double x) const {
  require_finite(x, "x");
  const double tau = policy_.tau;
  require(x >= tau, "killed occupation needs x >= tau");
  if (x == tau || g.is_zero()) return 0.0;
  quad::BatchIntegrand f = [&, this](std::span<const double> y, std::span<double> out) {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = g(y[i]) * density(x, y[i]);
  };
  std::vector<double> breaks = g.breakpoints(tau, x);
  breaks.push_back(x);
  for (double k : g.breakpoints(x, std::numeric_limits<double>::infinity())) breaks.push_back(k);
  const double a2 = params_.mu() * params_.mu() / (2.0 * params_.sigma2());
  QuadConfig outer = cfg_;
  outer.rel_tol = std::max(cfg_.rel_tol, 1e-8);
  return quad::integrate_with_breaks(f, tau, breaks, std::min(1.0 / a2, 1.0 + x - tau), outer, false)
      .value;
}

double p_star_alpha(const KilledResolvent& kr, double z) { return kr.p_star(z); }
double killed_resolvent_density(const KilledResolvent& kr, double x, double y) {
  return kr.density(x, y);
}
double killed_occupation(const KilledResolvent& kr, const PenaltyFn& g, double x) {
  return kr.occupation(g, x);
}

}  // namespace dam
