#include "dam/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dam/common.hpp"

namespace dam {

PenaltyFn PenaltyFn::constant(double c) {
  require_finite(c, "penalty constant");
  PenaltyFn g;
  g.values_ = {c};
  g.bound_ = std::fabs(c);
  return g;
}

PenaltyFn PenaltyFn::piecewise_linear(std::vector<double> knots, std::vector<double> values,
                                      double bound) {
  require(!knots.empty(), "piecewise-linear penalty needs at least one knot");
  require(knots.size() == values.size(), "penalty knots and values differ in length");
  double vmax = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require_finite(knots[i], "penalty knot");
    require_finite(values[i], "penalty value");
    if (i > 0) require(knots[i] > knots[i - 1], "penalty knots must be strictly increasing");
    vmax = std::max(vmax, std::fabs(values[i]));
  }
  if (std::isnan(bound)) {
    bound = vmax;
  } else {
    require_finite(bound, "penalty bound");
    require(vmax <= bound, "penalty values exceed the stated bound");
  }
  PenaltyFn g;
  if (knots.size() == 1) {
    g.values_ = {values[0]};
  } else {
    g.knots_ = std::move(knots);
    g.values_ = std::move(values);
  }
  g.bound_ = bound;
  return g;
}

double PenaltyFn::operator()(double x) const {
  if (knots_.empty()) return values_[0];
  if (x <= knots_.front()) return values_.front();
  if (x >= knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  const double w = (x - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
  return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double PenaltyFn::constant_value() const {
  require(is_constant(), "penalty is not constant");
  return values_[0];
}

bool PenaltyFn::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

bool PenaltyFn::is_nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

std::vector<double> PenaltyFn::breakpoints(double lo, double hi) const {
  std::vector<double> out;
  for (double k : knots_)
    if (k > lo && k < hi) out.push_back(k);
  return out;
}

std::vector<LinearPiece> PenaltyFn::pieces(double lo, double hi) const {
  require(hi >= lo, "piece range must be ordered");
  std::vector<LinearPiece> out;
  if (knots_.empty()) {
    out.push_back({lo, hi, values_[0], 0.0});
    return out;
  }
  // segment j spans [edge(j-1), edge(j)] with edges -inf, k0..k_{n-1}, +inf
  const std::size_t n = knots_.size();
  for (std::size_t j = 0; j <= n; ++j) {
    const double a = j == 0 ? -std::numeric_limits<double>::infinity() : knots_[j - 1];
    const double b = j == n ? std::numeric_limits<double>::infinity() : knots_[j];
    const double plo = std::max(a, lo);
    const double phi = std::min(b, hi);
    if (!(phi > plo)) continue;
    if (j == 0) {
      out.push_back({plo, phi, values_.front(), 0.0});
    } else if (j == n) {
      out.push_back({plo, phi, values_.back(), 0.0});
    } else {
      const double slope = (values_[j] - values_[j - 1]) / (b - a);
      out.push_back({plo, phi, values_[j - 1] - slope * a, slope});
    }
  }
  if (out.empty()) out.push_back({lo, hi, (*this)(lo), 0.0});
  return out;
}

PenaltyFn PenaltyFn::plus_constant(double c) const {
  PenaltyFn g = *this;
  for (double& v : g.values_) v += c;
  g.bound_ = 0.0;
  for (double v : g.values_) g.bound_ = std::max(g.bound_, std::fabs(v));
  return g;
}

std::string PenaltyFn::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (is_constant()) {
    os << "constant(" << values_[0] << ")";
    return os.str();
  }
  os << "piecewise_linear(";
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (i) os << "; ";
    os << knots_[i] << ":" << values_[i];
  }
  os << ")";
  return os.str();
}

}  // namespace dam
