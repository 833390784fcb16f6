#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace dam {

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a requested integral or expectation does not exist
/// (for example an undiscounted release-phase quantity with Mμ ≤ 1).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

inline void require_finite(double v, const char* name) {
  if (!(v == v) || v == std::numeric_limits<double>::infinity() ||
      v == -std::numeric_limits<double>::infinity())
    throw DomainError(std::string(name) + " must be finite");
}

/// A nonnegative quantity that is either a finite number or explicitly
/// infinite. Used for expectations that diverge on part of the parameter
/// space, so callers can branch on the designation instead of on inf.
class ExtendedReal {
 public:
  constexpr ExtendedReal(double v) : value_(v), infinite_(false) {}  // NOLINT

  static constexpr ExtendedReal infinite() { return ExtendedReal(); }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  double value() const {
    if (infinite_) throw DivergenceError("value requested from an infinite quantity");
    return value_;
  }
  constexpr double value_or(double fallback) const { return infinite_ ? fallback : value_; }

  /// Numeric view: +inf for the infinite designation.
  constexpr double as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  constexpr ExtendedReal() : value_(0.0), infinite_(true) {}
  double value_;
  bool infinite_;
};

}  // namespace dam
