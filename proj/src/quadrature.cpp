#include "dam/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "dam/common.hpp"

namespace dam::quad {
namespace {

// Kronrod abscissae (descending) and weights; odd indices are the 10-point
// Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk21(const BatchIntegrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 21> x;
  std::array<double, 21> fx;
  for (std::size_t j = 0; j < 10; ++j) {
    x[2 * j] = c - h * kXgk[j];
    x[2 * j + 1] = c + h * kXgk[j];
  }
  x[20] = c;
  f(x, fx);

  const double fc = fx[20];
  double resk = kWgk[10] * fc;
  double resg = 0.0;
  double resabs = std::fabs(resk);
  for (std::size_t j = 0; j < 10; ++j) {
    const double f1 = fx[2 * j];
    const double f2 = fx[2 * j + 1];
    if (!std::isfinite(f1) || !std::isfinite(f2)) throw DomainError("non-finite integrand value");
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  if (!std::isfinite(fc)) throw DomainError("non-finite integrand value");
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::fabs(fc - reskh);
  for (std::size_t j = 0; j < 10; ++j)
    resasc += kWgk[j] * (std::fabs(fx[2 * j] - reskh) + std::fabs(fx[2 * j + 1] - reskh));

  const double ah = std::fabs(h);
  resabs *= ah;
  resasc *= ah;
  double err = std::fabs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk * h, err};
}

}  // namespace

Result integrate(const BatchIntegrand& f, double a, double b, const QuadConfig& cfg) {
  if (a == b) return {};
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integration limits must be finite");

  std::priority_queue<Panel> work;
  std::vector<Panel> done;
  Panel first = gk21(f, a, b);
  int evaluations = 21;
  double total = first.value;
  double error = first.error;
  work.push(first);
  int subdivisions = 1;

  while (!work.empty() && error > std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total))) {
    if (subdivisions >= cfg.max_subdivisions) break;
    Panel worst = work.top();
    work.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b)) ||
        std::fabs(worst.b - worst.a) < 1e-14 * std::max(1.0, std::fabs(mid))) {
      done.push_back(worst);
      continue;
    }
    const Panel left = gk21(f, worst.a, mid);
    const Panel right = gk21(f, mid, worst.b);
    evaluations += 42;
    ++subdivisions;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    work.push(left);
    work.push(right);
  }

  Result r;
  r.evaluations = evaluations;
  while (!work.empty()) {
    done.push_back(work.top());
    work.pop();
  }
  // Sum from smallest contribution up for a reproducible total.
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const Panel& p : done) {
    r.value += p.value;
    r.abs_error += p.error;
  }
  r.converged = r.abs_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(r.value)) * 1.0000001;
  return r;
}

Result integrate_sqrt_left(const BatchIntegrand& f, double a, double b, const QuadConfig& cfg) {
  if (b <= a) return {};
  BatchIntegrand g = [&f, a](std::span<const double> w, std::span<double> out) {
    std::array<double, 21> x;
    for (std::size_t i = 0; i < w.size(); ++i) x[i] = a + w[i] * w[i];
    f(std::span<const double>(x.data(), w.size()), out);
    for (std::size_t i = 0; i < w.size(); ++i) out[i] *= 2.0 * w[i];
  };
  return integrate(g, 0.0, std::sqrt(b - a), cfg);
}

Result integrate_sqrt_right(const BatchIntegrand& f, double a, double b, const QuadConfig& cfg) {
  if (b <= a) return {};
  BatchIntegrand g = [&f, b](std::span<const double> w, std::span<double> out) {
    std::array<double, 21> x;
    for (std::size_t i = 0; i < w.size(); ++i) x[i] = b - w[i] * w[i];
    f(std::span<const double>(x.data(), w.size()), out);
    for (std::size_t i = 0; i < w.size(); ++i) out[i] *= 2.0 * w[i];
  };
  return integrate(g, 0.0, std::sqrt(b - a), cfg);
}

Result integrate_graded(const BatchIntegrand& f, double a, double b, double h,
                        const QuadConfig& cfg, bool sqrt_first) {
  Result total;
  if (b <= a) return total;
  double lo = a;
  double width = std::max(h, (b - a) * 1e-12);
  bool first = true;
  while (lo < b) {
    const double hi = std::min(b, lo + width);
    total += (first && sqrt_first) ? integrate_sqrt_left(f, lo, hi, cfg) : integrate(f, lo, hi, cfg);
    first = false;
    lo = hi;
    width *= 2.0;
  }
  return total;
}

Result integrate_to_infinity(const BatchIntegrand& f, double a, double scale,
                             const QuadConfig& cfg, bool sqrt_first) {
  require(scale > 0.0 && std::isfinite(scale), "tail scale must be positive");
  Result total;
  double lo = a;
  double width = scale;
  int quiet = 0;
  for (int k = 0; k < 160; ++k) {
    const double hi = lo + width;
    if (!std::isfinite(hi)) break;
    const Result piece = (k == 0 && sqrt_first) ? integrate_sqrt_left(f, lo, hi, cfg)
                                                : integrate(f, lo, hi, cfg);
    total += piece;
    const double mag = std::fabs(total.value);
    if (mag > 0.0 && std::fabs(piece.value) <= cfg.tail_mass_tol * mag)
      ++quiet;
    else
      quiet = 0;
    if (quiet >= 2) break;
    lo = hi;
    width *= 2.0;
  }
  return total;
}

Result integrate_with_breaks(const BatchIntegrand& f, double a, std::span<const double> breaks,
                             double tail_scale, const QuadConfig& cfg, bool sqrt_first) {
  Result total;
  double lo = a;
  bool first = true;
  for (double b : breaks) {
    if (!(b > lo)) continue;
    total += (first && sqrt_first) ? integrate_sqrt_left(f, lo, b, cfg) : integrate(f, lo, b, cfg);
    first = false;
    lo = b;
  }
  total += integrate_to_infinity(f, lo, tail_scale, cfg, first && sqrt_first);
  return total;
}

}  // namespace dam::quad
