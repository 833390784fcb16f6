#pragma once

// Adaptive Gauss–Kronrod (10/21-point) quadrature over batch integrands.
// Integrands receive all nodes of a panel at once so they can evaluate
// through the SIMD kernel table.

#include <functional>
#include <span>
#include <vector>

#include "dam/ig.hpp"

namespace dam::quad {

/// Evaluates f at every x[i] into fx[i].
using BatchIntegrand = std::function<void(std::span<const double> x, std::span<double> fx)>;

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = true;

  Result& operator+=(const Result& o) {
    value += o.value;
    abs_error += o.abs_error;
    evaluations += o.evaluations;
    converged = converged && o.converged;
    return *this;
  }
};

/// Wraps a scalar callable as a batch integrand.
template <class F>
BatchIntegrand pointwise(F f) {
  return [f = std::move(f)](std::span<const double> x, std::span<double> fx) {
    for (std::size_t i = 0; i < x.size(); ++i) fx[i] = f(x[i]);
  };
}

/// ∫_a^b f on a finite interval.
Result integrate(const BatchIntegrand& f, double a, double b, const QuadConfig& cfg);

/// ∫_a^b f where f ~ (x-a)^{-1/2} at a: substitutes x = a + w².
Result integrate_sqrt_left(const BatchIntegrand& f, double a, double b, const QuadConfig& cfg);
/// ∫_a^b f where f ~ (b-x)^{-1/2} at b: substitutes x = b - w².
Result integrate_sqrt_right(const BatchIntegrand& f, double a, double b, const QuadConfig& cfg);

/// ∫_a^b f over geometrically growing panels [a, a+h], [a+h, a+3h], ...,
/// for integrands concentrated in a layer of width ~h next to a.
Result integrate_graded(const BatchIntegrand& f, double a, double b, double h,
                        const QuadConfig& cfg, bool sqrt_first = false);

/// ∫_a^∞ f. Panels of doubling width starting at `scale` are added until
/// two consecutive panels each contribute less than tail_mass_tol of the
/// running total. With `sqrt_first` the first panel uses the x = a + w²
/// substitution.
Result integrate_to_infinity(const BatchIntegrand& f, double a, double scale,
                             const QuadConfig& cfg, bool sqrt_first = false);

/// ∫_a^∞ f with interior break points (sorted, > a); the first piece uses
/// the square-root substitution when `sqrt_first`.
Result integrate_with_breaks(const BatchIntegrand& f, double a, std::span<const double> breaks,
                             double tail_scale, const QuadConfig& cfg, bool sqrt_first);

}  // namespace dam::quad
