#include "dam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "dam/parallel.hpp"

namespace dam {

void SearchSpec::validate() const {
  for (double v : {lambda_min, lambda_max, tau_min, tau_max, M}) require_finite(v, "search bound");
  require(lambda_min >= 0.0 && lambda_min <= lambda_max, "search needs 0 <= lambda_min <= lambda_max");
  require(tau_min >= 0.0 && tau_min <= tau_max, "search needs 0 <= tau_min <= tau_max");
  require(tau_max < lambda_max, "search needs tau_max < lambda_max");
  require(grid >= 4, "search grid must have at least 4 points per axis");
  require(refine_rounds >= 0, "refine_rounds must be >= 0");
  require(min_gap >= 0.0, "min_gap must be >= 0");
  require(M > 0.0, "release rate M must be positive");
  if (start) require(*start >= 0.0, "search start must be >= 0");
}

double objective_value(const IGParams& p, const CostParams& cost, const SearchSpec& spec,
                       double lambda, double tau, const QuadConfig& cfg) {
  const Policy pol{lambda, tau, spec.M};
  const CostModel model(p, pol, cost, cfg, spec.model_options);
  if (spec.objective == Objective::average) return model.average_cost().as_double();
  return model.discounted_total_cost(spec.start.value_or(tau));
}

namespace {

bool feasible(const SearchSpec& s, double lambda, double tau) {
  return lambda >= s.lambda_min && lambda <= s.lambda_max && tau >= s.tau_min &&
         tau <= s.tau_max && lambda - tau >= s.gap() * (1.0 - 1e-12);
}

// (value, λ, τ) lexicographic; infinite values never win
bool better(const TracePoint& a, const TracePoint& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.lambda != b.lambda) return a.lambda < b.lambda;
  return a.tau < b.tau;
}

void evaluate(const IGParams& p, const CostParams& cost, const SearchSpec& spec,
              const QuadConfig& cfg, std::vector<TracePoint>& pts) {
  parallel_for(pts.size(), spec.threads, [&](std::size_t i) {
    pts[i].value = objective_value(p, cost, spec, pts[i].lambda, pts[i].tau, cfg);
    if (std::isnan(pts[i].value)) pts[i].value = std::numeric_limits<double>::infinity();
  });
}

double axis(double lo, double hi, int n, int i) {
  if (i == n - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

OptimizeResult finish(OptimizeResult r) {
  const TracePoint* best = nullptr;
  for (const TracePoint& t : r.trace)
    if (std::isfinite(t.value) && (best == nullptr || better(t, *best))) best = &t;
  if (best == nullptr) {
    r.feasible = false;
    if (r.reason.empty()) r.reason = "objective is infinite at every feasible policy";
    return r;
  }
  r.feasible = true;
  r.lambda = best->lambda;
  r.tau = best->tau;
  r.value = best->value;
  return r;
}

}  // namespace

OptimizeResult exhaustive_grid(const IGParams& p, const CostParams& cost, const SearchSpec& spec,
                               int n, const QuadConfig& cfg) {
  spec.validate();
  require(n >= 2, "exhaustive grid needs n >= 2");
  OptimizeResult r;
  std::vector<TracePoint> pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double l = axis(spec.lambda_min, spec.lambda_max, n, i);
      const double t = axis(spec.tau_min, spec.tau_max, n, j);
      if (feasible(spec, l, t)) pts.push_back({l, t, 0.0, 0});
    }
  require(!pts.empty(), "search region has no feasible policy");
  evaluate(p, cost, spec, cfg, pts);
  r.trace = std::move(pts);
  r.cell_lambda = (spec.lambda_max - spec.lambda_min) / (n - 1);
  r.cell_tau = (spec.tau_max - spec.tau_min) / (n - 1);
  return finish(std::move(r));
}

OptimizeResult optimize(const IGParams& p, const CostParams& cost, const SearchSpec& spec,
                        const QuadConfig& cfg) {
  spec.validate();
  cost.validate();
  OptimizeResult r;
  if (spec.objective == Objective::average && p.mu() * spec.M <= 1.0) {
    r.reason = "average cost is infinite for every policy when mu*M <= 1";
    return r;
  }
  if (spec.objective == Objective::discounted)
    require(cost.alpha > 0.0, "discounted objective needs alpha > 0");

  std::vector<TracePoint> pts;
  for (int i = 0; i < spec.grid; ++i)
    for (int j = 0; j < spec.grid; ++j) {
      const double l = axis(spec.lambda_min, spec.lambda_max, spec.grid, i);
      const double t = axis(spec.tau_min, spec.tau_max, spec.grid, j);
      if (feasible(spec, l, t)) pts.push_back({l, t, 0.0, 0});
    }
  require(!pts.empty(), "search region has no feasible policy");
  evaluate(p, cost, spec, cfg, pts);
  std::map<std::pair<double, double>, double> seen;
  for (const TracePoint& t : pts) seen[{t.lambda, t.tau}] = t.value;
  r.trace = pts;

  double hl = (spec.lambda_max - spec.lambda_min) / (spec.grid - 1);
  double ht = (spec.tau_max - spec.tau_min) / (spec.grid - 1);
  for (int round = 1; round <= spec.refine_rounds; ++round) {
    const OptimizeResult inc = finish(r);
    if (!inc.feasible) break;
    hl *= 0.5;
    ht *= 0.5;
    std::vector<TracePoint> probe;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) {
        const double l = std::clamp(inc.lambda + a * hl, spec.lambda_min, spec.lambda_max);
        const double t = std::clamp(inc.tau + b * ht, spec.tau_min, spec.tau_max);
        if (!feasible(spec, l, t) || seen.count({l, t})) continue;
        seen[{l, t}] = 0.0;
        probe.push_back({l, t, 0.0, round});
      }
    evaluate(p, cost, spec, cfg, probe);
    r.trace.insert(r.trace.end(), probe.begin(), probe.end());
  }
  r.cell_lambda = hl;
  r.cell_tau = ht;
  return finish(std::move(r));
}

}  // namespace dam
