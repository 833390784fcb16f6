#pragma once

// Grid search over (λ, τ) with local refinement around the incumbent.

#include <optional>
#include <string>
#include <vector>

#include "dam/common.hpp"
#include "dam/cost_model.hpp"

namespace dam {

enum class Objective { discounted, average };

struct SearchSpec {
  double lambda_min = 0.0;
  double lambda_max = 1.0;
  double tau_min = 0.0;
  double tau_max = 0.0;
  int grid = 8;             // points per axis on the coarse grid
  int refine_rounds = 4;    // each round halves the spacing
  Objective objective = Objective::average;
  std::optional<double> start;  // discounted objective: start level; τ of each policy when absent
  double min_gap = 0.0;     // 0: λ_max / 100
  double M = 1.0;
  unsigned threads = 1;
  CostModelOptions model_options{true, LandingRoute::levy};

  void validate() const;
  double gap() const { return min_gap > 0.0 ? min_gap : lambda_max / 100.0; }
};

struct TracePoint {
  double lambda = 0.0;
  double tau = 0.0;
  double value = 0.0;  // +inf when the objective is infinite
  int round = 0;
};

struct OptimizeResult {
  bool feasible = false;
  std::string reason;  // why no finite optimum exists
  double lambda = 0.0;
  double tau = 0.0;
  double value = 0.0;
  double cell_lambda = 0.0;  // final spacing
  double cell_tau = 0.0;
  std::vector<TracePoint> trace;
};

/// Objective value at one policy; +inf where it is infinite.
double objective_value(const IGParams& p, const CostParams& cost, const SearchSpec& spec,
                       double lambda, double tau, const QuadConfig& cfg = {});

OptimizeResult optimize(const IGParams& p, const CostParams& cost, const SearchSpec& spec,
                        const QuadConfig& cfg = {});

/// Plain evaluation of every feasible node of an n×n grid, same ordering rules.
OptimizeResult exhaustive_grid(const IGParams& p, const CostParams& cost, const SearchSpec& spec,
                               int n, const QuadConfig& cfg = {});

}  // namespace dam
