#pragma once

// First-passage laws of the two phases of a cycle.
//   fill:    W_λ  = inf{t : x + I_t ≥ λ}, started at x ≤ λ, no release;
//   release: W*_τ = inf{t : x + I_t - Mt = τ}, started at x ≥ τ.

#include "dam/common.hpp"
#include "dam/ig.hpp"

namespace dam {

/// The P^M_{λ,τ} control: release at rate M switches on when content
/// reaches λ and off when it falls back to τ.
struct Policy {
  double lambda = 0.0;
  double tau = 0.0;
  double M = 1.0;

  /// Throws DomainError unless 0 ≤ τ < λ < ∞ and M > 0.
  void validate() const;
};

/// Increasing root of Mη = α + ψ(η).
double eta(const IGParams& p, double M, double alpha);
/// Mη - α - ψ(η).
double eta_residual(const IGParams& p, double M, double alpha, double value);

/// E_x e^{-αW_λ}. Exactly 1 at x = λ or α = 0.
double lt_w_lambda(const IGParams& p, double x, double lambda, double alpha);
/// P_x(W_λ ≤ t) = P(I_t ≥ λ - x).
double cdf_w_lambda(const IGParams& p, double x, double lambda, double t);
/// The erfc expression sometimes quoted for the same probability, with the
/// level entering without its square root. Kept only for comparison.
double cdf_w_lambda_unscaled(const IGParams& p, double x, double lambda, double t);
/// E_x W_λ.
double mean_w_lambda(const IGParams& p, double x, double lambda);

/// E_x e^{-αW*_τ} = e^{-(x-τ)η(α)}; at α = 0 this is P_x(W*_τ < ∞).
double lt_w_tau_star(const IGParams& p, double M, double x, double tau, double alpha);
double prob_w_tau_star_finite(const IGParams& p, double M, double x, double tau);
/// Density of W*_τ on t > (x-τ)/M (defective when μM < 1).
double pdf_w_tau_star(const IGParams& p, double M, double x, double tau, double t);

struct MeanVariance {
  ExtendedReal mean;
  ExtendedReal variance;
};
/// Mean and variance of W*_τ; infinite when μM ≤ 1 and x > τ.
MeanVariance mean_var_w_tau_star(const IGParams& p, double M, double x, double tau);

}  // namespace dam
