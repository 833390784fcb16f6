#pragma once

// Resolvent (α-potential) densities.
//
// Free input process: U_α(dy) = u_α(y) dy with
//   ∫_0^∞ e^{-βy} u_α(y) dy = σ² / (ασ² + √(2βσ² + μ²) - μ).
// Content process during release (rate M) killed on reaching τ:
//   U*_α(dy - x) = [p*_α(y - x) - e^{-(x-τ)η(α)} p*_α(y - τ)] dy,
//   p*_α(z) = ∫_0^∞ e^{-αt} p(t, z + Mt) dt.

#include <span>

#include "dam/common.hpp"
#include "dam/ig.hpp"
#include "dam/passage.hpp"
#include "dam/penalty.hpp"

namespace dam {

class ResolventDensity {
 public:
  ResolventDensity(IGParams params, double alpha);

  const IGParams& params() const { return params_; }
  double alpha() const { return alpha_; }

  /// u_α(y), y > 0.
  double operator()(double y) const;
  /// du_α/dy, y > 0.
  double derivative(double y) const;
  /// Batch forms through the active kernel table; 0 where y ≤ 0.
  void evaluate(std::span<const double> y, std::span<double> out) const;
  void evaluate_derivative(std::span<const double> y, std::span<double> out) const;

  /// Closed-form Laplace transform; infinite at α = β = 0.
  ExtendedReal transform(double beta) const;
  /// Exponential rate at which u_α(y) e^{-βy} decays, used to size tails.
  double decay_rate(double beta = 0.0) const;

  /// Negative-control copy: the erfc term enters with the wrong sign.
  ResolventDensity with_sign_flip() const;
  bool sign_flipped() const { return flipped_; }

 private:
  IGParams params_;
  double alpha_;
  bool flipped_ = false;
};

double u_alpha(const ResolventDensity& res, double y);
double u_alpha_prime(const ResolventDensity& res, double y);

/// ∫_0^∞ e^{-βy} u_α(y) dy by quadrature. DivergenceError at α = β = 0.
double transform_by_quadrature(const ResolventDensity& res, double beta, const QuadConfig& cfg);
/// ∫_from^∞ e^{-βy} u_α(y) dy by quadrature.
double tail_integral(const ResolventDensity& res, double beta, double from, const QuadConfig& cfg);

/// ∫_0^{to-from} g(from + y) u_α(y) dy: the discounted penalty accrued by
/// the input process started at `from` before it passes `to`.
double integrate_resolvent(const ResolventDensity& res, const PenaltyFn& g, double from, double to,
                           const QuadConfig& cfg);

class KilledResolvent {
 public:
  /// DivergenceError when α = 0 and μM ≤ 1.
  KilledResolvent(IGParams params, Policy policy, double alpha, QuadConfig cfg = {});

  const IGParams& params() const { return params_; }
  const Policy& policy() const { return policy_; }
  double alpha() const { return alpha_; }
  double eta() const { return eta_; }

  /// p*_α(z) for any real z.
  double p_star(double z) const;
  /// Density of U*_α(dy - x) at y > τ, for x ≥ τ.
  double density(double x, double y) const;

  /// ∫_τ^∞ g(y) U*_α(dy - x).
  double occupation(const PenaltyFn& g, double x) const;
  /// Same with g given by linear pieces inside (τ, ∞) and zero elsewhere.
  double occupation(std::span<const LinearPiece> pieces, double x) const;
  /// Occupation computed by integrating `density` over y; slow, for
  /// cross-checking the default route.
  double occupation_by_density(const PenaltyFn& g, double x) const;

 private:
  IGParams params_;
  Policy policy_;
  double alpha_;
  double eta_;
  QuadConfig cfg_;
};

double p_star_alpha(const KilledResolvent& kr, double z);
double killed_resolvent_density(const KilledResolvent& kr, double x, double y);
double killed_occupation(const KilledResolvent& kr, const PenaltyFn& g, double x);

}  // namespace dam
