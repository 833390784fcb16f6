#include "dam/cost_model.hpp"

#include <cmath>
#include <limits>

#include "dam/resolvents.hpp"

namespace dam {

void CostParams::validate() const {
  require_finite(k1, "k1");
  require_finite(k2, "k2");
  require_finite(r, "r");
  require_finite(alpha, "alpha");
  require(k1 >= 0.0 && k2 >= 0.0, "switching costs must be >= 0");
  require(r >= 0.0, "reward R must be >= 0");
  require(alpha >= 0.0, "alpha must be >= 0");
  require(std::isfinite(g.bound()) && std::isfinite(g_star.bound()), "penalties must be bounded");
  require(g.is_nonnegative(), "fill penalty g must be nonnegative");
  require(g_star.is_nonnegative(), "release penalty g* must be nonnegative");
}

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& o) {
  switching += o.switching;
  reward += o.reward;
  penalty_fill += o.penalty_fill;
  penalty_release += o.penalty_release;
  return *this;
}

CostBreakdown CostBreakdown::scaled(double f) const {
  return {switching * f, reward * f, penalty_fill * f, penalty_release * f};
}

CostModel::CostModel(IGParams params, Policy policy, CostParams cost, QuadConfig cfg,
                     CostModelOptions options)
    : params_(params), policy_(policy), cost_(std::move(cost)), cfg_(cfg), options_(options) {
  policy_.validate();
  cost_.validate();
  cfg_.validate();
}

double CostModel::cycle_transform(double x) const {
  const double alpha = cost_.alpha;
  require(alpha > 0.0, "cycle transform needs alpha > 0");
  require_finite(x, "x");
  require(x >= 0.0, "start level must be >= 0");
  const double eta = dam::eta(params_, policy_.M, alpha);
  const double shift = std::exp(-eta * (x - policy_.tau));
  if (x >= policy_.lambda) return shift;
  const ResolventDensity u(params_, alpha);
  return policy_.M * eta * shift * tail_integral(u, eta, policy_.lambda - x, cfg_);
}

double CostModel::release_penalty_discounted(double x) const {
  const PenaltyFn& gs = cost_.g_star;
  if (gs.is_zero()) return 0.0;
  const double alpha = cost_.alpha;
  const double tau = policy_.tau;
  const double lambda = policy_.lambda;
  const KilledResolvent kr(params_, policy_, alpha, cfg_);
  if (x >= lambda) return kr.occupation(gs, x);
  if (options_.closed_form_constants && gs.is_constant())
    return gs.constant_value() * (lt_w_lambda(params_, x, lambda, alpha) - cycle_transform(x)) /
           alpha;
  const OvershootLaw law(params_, lambda - x, cfg_);
  std::vector<double> breaks;
  for (double k : gs.breakpoints(tau, std::numeric_limits<double>::infinity()))
    breaks.push_back(k - x);
  return law.expect([&](double s) { return kr.occupation(gs, x + s); }, alpha, breaks,
                    options_.landing_route);
}

CostBreakdown CostModel::cycle_cost_breakdown(double x) const {
  const double alpha = cost_.alpha;
  require(alpha > 0.0, "discounted cost needs alpha > 0");
  require_finite(x, "x");
  require(x >= 0.0, "start level must be >= 0");
  const double M = policy_.M;
  const double lambda = policy_.lambda;
  const double eta = dam::eta(params_, M, alpha);
  CostBreakdown b;
  if (x >= lambda) {
    // the fill phase is empty: both switches happen at time 0
    b.switching = M * (cost_.k1 + cost_.k2);
    b.reward = -cost_.r * M * (1.0 - std::exp(-eta * (x - policy_.tau))) / alpha;
    b.penalty_release = release_penalty_discounted(x);
    return b;
  }
  const double lt = lt_w_lambda(params_, x, lambda, alpha);
  b.switching = M * (cost_.k2 + cost_.k1 * lt);
  if (cost_.r != 0.0) b.reward = -cost_.r * M * (lt - cycle_transform(x)) / alpha;
  if (!cost_.g.is_zero()) {
    if (options_.closed_form_constants && cost_.g.is_constant())
      b.penalty_fill = cost_.g.constant_value() * (1.0 - lt) / alpha;
    else
      b.penalty_fill = integrate_resolvent(ResolventDensity(params_, alpha), cost_.g, x, lambda, cfg_);
  }
  b.penalty_release = release_penalty_discounted(x);
  return b;
}

CostBreakdown CostModel::total_cost_breakdown(double x) const {
  CostBreakdown first = cycle_cost_breakdown(x);
  const double phi_x = cycle_transform(x);
  const double phi_tau = cycle_transform(policy_.tau);
  const CostBreakdown later = cycle_cost_breakdown(policy_.tau);
  first += later.scaled(phi_x / (1.0 - phi_tau));
  return first;
}

ExtendedReal CostModel::mean_cycle_length() const {
  return dam::mean_cycle_length(params_, policy_);
}

double CostModel::release_penalty_average() const {
  const PenaltyFn& gs = cost_.g_star;
  if (gs.is_zero()) return 0.0;
  const double tau = policy_.tau;
  const double L = policy_.lambda - tau;
  const double drift = params_.mu() * policy_.M - 1.0;
  if (options_.closed_form_constants && gs.is_constant())
    return gs.constant_value() * mean_w_lambda(params_, 0.0, L) / drift;
  const KilledResolvent kr(params_, policy_, 0.0, cfg_);
  const OvershootLaw law(params_, L, cfg_);
  std::vector<double> breaks;
  for (double k : gs.breakpoints(tau, std::numeric_limits<double>::infinity()))
    breaks.push_back(k - tau);
  return law.expect([&](double s) { return kr.occupation(gs, tau + s); }, 0.0, breaks,
                    options_.landing_route);
}

std::optional<CostBreakdown> CostModel::average_breakdown() const {
  const ExtendedReal cycle = mean_cycle_length();
  if (cycle.is_infinite()) return std::nullopt;
  const double M = policy_.M;
  const double tau = policy_.tau;
  const double L = policy_.lambda - tau;
  const double drift = params_.mu() * M - 1.0;
  CostBreakdown b;
  b.switching = M * (cost_.k1 + cost_.k2);
  b.reward = -cost_.r * M * mean_w_lambda(params_, 0.0, L) / drift;
  if (!cost_.g.is_zero()) {
    if (options_.closed_form_constants && cost_.g.is_constant())
      b.penalty_fill = cost_.g.constant_value() * mean_w_lambda(params_, 0.0, L);
    else
      b.penalty_fill =
          integrate_resolvent(ResolventDensity(params_, 0.0), cost_.g, tau, policy_.lambda, cfg_);
  }
  b.penalty_release = release_penalty_average();
  return b.scaled(1.0 / cycle.value());
}

ExtendedReal CostModel::average_cost() const {
  const auto b = average_breakdown();
  if (!b) return ExtendedReal::infinite();
  return b->total();
}

double CostModel::stationary_cdf(double z) const {
  require_finite(z, "z");
  const ExtendedReal cycle = mean_cycle_length();
  if (cycle.is_infinite())
    throw DivergenceError("no stationary distribution when mu*M <= 1");
  const double tau = policy_.tau;
  const double lambda = policy_.lambda;
  if (z <= tau) return 0.0;
  const double fill = integrate_resolvent(ResolventDensity(params_, 0.0), PenaltyFn::constant(1.0),
                                          tau, std::min(lambda, z), cfg_);
  const KilledResolvent kr(params_, policy_, 0.0, cfg_);
  const OvershootLaw law(params_, lambda - tau, cfg_);
  const LinearPiece below{tau, z, 1.0, 0.0};
  std::vector<double> breaks{z - tau};
  const double release = law.expect(
      [&](double s) { return kr.occupation(std::span<const LinearPiece>(&below, 1), tau + s); }, 0.0,
      breaks, options_.landing_route);
  return std::clamp((fill + release) / cycle.value(), 0.0, 1.0);
}

PolicyEvaluation CostModel::evaluate(double x) const {
  PolicyEvaluation e;
  e.start = x;
  if (cost_.alpha > 0.0) {
    e.discounted = total_cost_breakdown(x);
    e.discounted_total = e.discounted->total();
    e.cycle_transform_start = cycle_transform(x);
    e.cycle_transform_tau = cycle_transform(policy_.tau);
  }
  e.cycle_mean = mean_cycle_length();
  e.average = average_breakdown();
  if (e.average) e.average_rate = e.average->total();
  return e;
}

double cycle_transform(const IGParams& p, const Policy& policy, double alpha, double x,
                       const QuadConfig& cfg) {
  CostParams c;
  c.alpha = alpha;
  return CostModel(p, policy, c, cfg).cycle_transform(x);
}

double discounted_cycle_cost(const IGParams& p, const Policy& policy, const CostParams& cost,
                             double x, const QuadConfig& cfg) {
  return CostModel(p, policy, cost, cfg).discounted_cycle_cost(x);
}

double discounted_total_cost(const IGParams& p, const Policy& policy, const CostParams& cost,
                             double x, const QuadConfig& cfg) {
  return CostModel(p, policy, cost, cfg).discounted_total_cost(x);
}

ExtendedReal mean_cycle_length(const IGParams& p, const Policy& policy) {
  policy.validate();
  const double drift = p.mu() * policy.M - 1.0;
  if (drift <= 0.0) return ExtendedReal::infinite();
  return p.mu() * policy.M * mean_w_lambda(p, 0.0, policy.lambda - policy.tau) / drift;
}

ExtendedReal average_cost(const IGParams& p, const Policy& policy, const CostParams& cost,
                          const QuadConfig& cfg) {
  return CostModel(p, policy, cost, cfg).average_cost();
}

double stationary_cdf(const IGParams& p, const Policy& policy, double z, const QuadConfig& cfg) {
  CostParams c;
  return CostModel(p, policy, c, cfg).stationary_cdf(z);
}

}  // namespace dam
