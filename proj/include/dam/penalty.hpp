#pragma once

// Penalty rate functions g, g*: either a constant or a piecewise-linear
// interpolant through sorted knots, held flat outside the knot range.

#include <limits>
#include <string>
#include <vector>

namespace dam {

struct LinearPiece {
  double lo;
  double hi;  // may be +inf
  double intercept;
  double slope;

  double at(double x) const { return intercept + slope * x; }
};

class PenaltyFn {
 public:
  /// g ≡ 0.
  PenaltyFn() = default;

  static PenaltyFn constant(double c);
  /// Interpolates (knots[i], values[i]); knots strictly increasing. When
  /// bound is given, every |value| must respect it; otherwise the bound is
  /// max |value|.
  static PenaltyFn piecewise_linear(std::vector<double> knots, std::vector<double> values,
                                    double bound = std::numeric_limits<double>::quiet_NaN());

  double operator()(double x) const;

  bool is_constant() const { return knots_.size() <= 1; }
  /// Value of a constant penalty; DomainError otherwise.
  double constant_value() const;
  double bound() const { return bound_; }
  bool is_zero() const;
  bool is_nonnegative() const;
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

  /// Knots strictly inside (lo, hi).
  std::vector<double> breakpoints(double lo, double hi) const;
  /// Linear pieces that exactly cover [lo, hi].
  std::vector<LinearPiece> pieces(double lo, double hi) const;

  /// g + c.
  PenaltyFn plus_constant(double c) const;

  std::string describe() const;

 private:
  std::vector<double> knots_;
  std::vector<double> values_{0.0};
  double bound_ = 0.0;
};

}  // namespace dam
