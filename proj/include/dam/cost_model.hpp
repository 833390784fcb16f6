#pragma once

// Policy economics under P^M_{λ,τ}: discounted cycle cost, the cycle
// transform, total discounted cost, mean cycle length, long-run average
// cost and the stationary content distribution.
//
// A cycle starts when release stops at τ (switch-off cost K₂M), fills until
// the content first reaches λ (switch-on cost K₁M), then releases at rate M
// until it is back at τ. Penalty g accrues while filling, g* while
// releasing, and each unit released earns R.

#include <optional>
#include <span>
#include <vector>

#include "dam/common.hpp"
#include "dam/ig.hpp"
#include "dam/overshoot.hpp"
#include "dam/passage.hpp"
#include "dam/penalty.hpp"

namespace dam {

struct CostParams {
  double k1 = 0.0;
  double k2 = 0.0;
  double r = 0.0;
  double alpha = 0.0;
  PenaltyFn g;
  PenaltyFn g_star;

  void validate() const;
};

struct CostBreakdown {
  double switching = 0.0;
  double reward = 0.0;  // ≤ 0: rewards enter as negative cost
  double penalty_fill = 0.0;
  double penalty_release = 0.0;

  double total() const { return switching + reward + penalty_fill + penalty_release; }
  CostBreakdown& operator+=(const CostBreakdown& o);
  CostBreakdown scaled(double f) const;
};

struct PolicyEvaluation {
  double start = 0.0;
  /// Present only when α > 0.
  std::optional<CostBreakdown> discounted;
  std::optional<double> discounted_total;
  std::optional<double> cycle_transform_start;
  std::optional<double> cycle_transform_tau;
  /// Per unit time; absent when the cycle mean is infinite.
  std::optional<CostBreakdown> average;
  ExtendedReal average_rate = ExtendedReal::infinite();
  ExtendedReal cycle_mean = ExtendedReal::infinite();
};

struct CostModelOptions {
  /// Use closed forms for constant penalties instead of quadrature.
  bool closed_form_constants = false;
  LandingRoute landing_route = LandingRoute::levy;
};

class CostModel {
 public:
  CostModel(IGParams params, Policy policy, CostParams cost, QuadConfig cfg = {},
            CostModelOptions options = {});

  const IGParams& params() const { return params_; }
  const Policy& policy() const { return policy_; }
  const CostParams& cost() const { return cost_; }

  /// E_x e^{-αT}, T the end of the first cycle started at x.
  double cycle_transform(double x) const;
  /// C_α(x): discounted cost of the first cycle started at x (α > 0).
  CostBreakdown cycle_cost_breakdown(double x) const;
  double discounted_cycle_cost(double x) const { return cycle_cost_breakdown(x).total(); }
  /// C_α(x) plus all later cycles.
  CostBreakdown total_cost_breakdown(double x) const;
  double discounted_total_cost(double x) const { return total_cost_breakdown(x).total(); }

  /// E_τ of the cycle length; infinite when μM ≤ 1.
  ExtendedReal mean_cycle_length() const;
  /// Long-run cost per unit time, split by component; nullopt when μM ≤ 1.
  std::optional<CostBreakdown> average_breakdown() const;
  ExtendedReal average_cost() const;

  /// Long-run fraction of time with content ≤ z. DivergenceError when μM ≤ 1.
  double stationary_cdf(double z) const;

  PolicyEvaluation evaluate(double x) const;

 private:
  double release_penalty_discounted(double x) const;
  double release_penalty_average() const;

  IGParams params_;
  Policy policy_;
  CostParams cost_;
  QuadConfig cfg_;
  CostModelOptions options_;
};

double cycle_transform(const IGParams& p, const Policy& policy, double alpha, double x,
                       const QuadConfig& cfg = {});
double discounted_cycle_cost(const IGParams& p, const Policy& policy, const CostParams& cost,
                             double x, const QuadConfig& cfg = {});
double discounted_total_cost(const IGParams& p, const Policy& policy, const CostParams& cost,
                             double x, const QuadConfig& cfg = {});
ExtendedReal mean_cycle_length(const IGParams& p, const Policy& policy);
ExtendedReal average_cost(const IGParams& p, const Policy& policy, const CostParams& cost,
                          const QuadConfig& cfg = {});
double stationary_cdf(const IGParams& p, const Policy& policy, double z,
                      const QuadConfig& cfg = {});

}  // namespace dam
