#pragma once

// Monte Carlo simulation of the content process under P^M_{λ,τ}.
//
// Fill phase (default, exact): the input process is the first-passage
// process of X_s = μs + σB_s, I_t = inf{s : X_s > t}. Hence W_L equals
// the running maximum of X over [0, L], and the landing level is L plus an
// independent first-passage time of X over the remaining gap. The maximum
// is sampled exactly segment by segment from Brownian-bridge maxima.
// Fill phase (time_grid): IG increments on a time grid refined near λ, with
// crossings detected at grid times. Biased by the grid; kept as a check.
//
// Release phase: the content drains at rate M and input arrives in steps of
// length dt (jumps placed at step ends). Once the drain alone could reach τ
// within a step, the hitting time is sampled exactly: from level τ + d the
// content cannot reach τ before d/M, and at d/M it stands at τ + I_{d/M}.

#include <cstdint>
#include <optional>
#include <vector>

#include "dam/cost_model.hpp"
#include "dam/ig.hpp"
#include "dam/passage.hpp"

namespace dam {

enum class FillMode { exact, time_grid };

struct SimConfig {
  double dt = 0.01;          // release step; content step in exact fill mode; base time step in grid mode
  int refine_factor = 10;    // time_grid mode: step shrink near λ
  int refine_levels = 2;     // time_grid mode: number of shrinks
  std::uint64_t n_cycles = 10000;
  double min_total_time = 0.0;  // keep simulating whole chunks until reached
  double horizon = 1e6;      // per-cycle time cap
  std::uint64_t seed = 1;
  double burn_in = 0.0;      // whole cycles covering this much time are left out of occupancy
  std::optional<double> start;  // first-cycle start level; τ when absent
  FillMode fill_mode = FillMode::exact;
  int occupancy_bins = 400;
  double occupancy_max = 0.0;   // 0: chosen from the policy
  unsigned threads = 1;

  void validate() const;
};

struct CycleRecord {
  std::uint64_t index = 0;
  double start = 0.0;
  double w_lambda = 0.0;
  double landing = 0.0;     // content level when release switches on
  double w_tau_star = 0.0;
  double length = 0.0;
  double discount = 1.0;    // e^{-α length}
  CostBreakdown discounted;    // discounted to the cycle start
  CostBreakdown undiscounted;
  bool horizon_exceeded = false;

  double cost_discounted() const { return discounted.total(); }
  double cost_undiscounted() const { return undiscounted.total(); }
};

struct Occupancy {
  double lo = 0.0;
  double width = 0.0;
  std::vector<double> time;  // time spent per bin [lo + i·width, lo + (i+1)·width)
  double below = 0.0;        // time below lo
  double above = 0.0;        // time beyond the last bin
  double total = 0.0;

  void add_interval(double a, double b, double duration);
  void merge(const Occupancy& o);
  /// Right edge of each bin and the time fraction at or below it.
  std::vector<std::pair<double, double>> cdf() const;
  double cdf_at(double z) const;
};

struct SimResult {
  IGParams params;
  Policy policy;
  CostParams cost;
  SimConfig config;
  std::vector<CycleRecord> cycles;        // iid cycles started at τ
  std::vector<CycleRecord> first_cycles;  // cycles started at config.start, when it differs from τ
  Occupancy occupancy;                    // cycles started at τ, after burn-in
  std::uint64_t burn_in_cycles = 0;
  double total_time = 0.0;
  std::uint64_t horizon_exceeded = 0;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  std::uint64_t n = 0;
};

struct FillSample {
  double w = 0.0;
  double landing = 0.0;  // I_W, relative to the start
};

/// One fill phase from 0 to level L > 0.
FillSample simulate_fill(const IGParams& p, double L, RngStream& rng, FillMode mode = FillMode::exact,
                         double dt = 0.01, int refine_factor = 10, int refine_levels = 2);
/// One release phase from τ + d at rate M; returns +inf past the horizon.
double simulate_release(const IGParams& p, double M, double d, RngStream& rng, double horizon = 1e6);

SimResult simulate_cycles(const IGParams& p, const Policy& policy, const CostParams& cost,
                          const SimConfig& sim);

/// Total discounted cost from the configured start: consecutive cycles are
/// chained into trajectories until the discount falls below 1e-10.
Estimate estimate_discounted(const SimResult& r);
/// E e^{-αT} over cycles started at τ.
Estimate estimate_cycle_transform(const SimResult& r);
/// Long-run average cost (renewal-reward ratio, delta-method SE).
std::optional<Estimate> estimate_average(const SimResult& r);
Estimate estimate_cycle_mean(const SimResult& r);
/// Empirical stationary distribution function at the occupancy bin edges.
std::vector<std::pair<double, double>> estimate_stationary(const SimResult& r);

}  // namespace dam
