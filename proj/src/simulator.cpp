#include "dam/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "dam/common.hpp"
#include "dam/parallel.hpp"

namespace dam {

void SimConfig::validate() const {
  require_finite(dt, "simulation dt");
  require(dt > 0.0, "simulation dt must be positive");
  require(refine_factor >= 1, "refine_factor must be >= 1");
  require(refine_levels >= 0, "refine_levels must be >= 0");
  require(n_cycles >= 1, "n_cycles must be >= 1");
  require(min_total_time >= 0.0, "min_total_time must be >= 0");
  require(horizon > 0.0, "horizon must be positive");
  require(burn_in >= 0.0, "burn_in must be >= 0");
  require(occupancy_bins >= 1, "occupancy_bins must be >= 1");
  require(occupancy_max >= 0.0, "occupancy_max must be >= 0");
  if (start) {
    require_finite(*start, "simulation start");
    require(*start >= 0.0, "simulation start must be >= 0");
  }
}

void Occupancy::add_interval(double a, double b, double duration) {
  if (duration <= 0.0) return;
  total += duration;
  if (b < a) std::swap(a, b);
  const double hi = lo + width * static_cast<double>(time.size());
  if (b <= a) {
    if (a < lo)
      below += duration;
    else if (a >= hi)
      above += duration;
    else
      time[std::min(time.size() - 1, static_cast<std::size_t>((a - lo) / width))] += duration;
    return;
  }
  const double rate = duration / (b - a);
  if (a < lo) below += rate * (std::min(b, lo) - a);
  if (b > hi) above += rate * (b - std::max(a, hi));
  const double ca = std::max(a, lo);
  const double cb = std::min(b, hi);
  if (cb <= ca) return;
  std::size_t i = std::min(time.size() - 1, static_cast<std::size_t>((ca - lo) / width));
  double left = ca;
  while (left < cb && i < time.size()) {
    const double edge = std::min(cb, lo + width * static_cast<double>(i + 1));
    if (edge > left) time[i] += rate * (edge - left);
    left = edge;
    ++i;
  }
}

void Occupancy::merge(const Occupancy& o) {
  for (std::size_t i = 0; i < time.size(); ++i) time[i] += o.time[i];
  below += o.below;
  above += o.above;
  total += o.total;
}

std::vector<std::pair<double, double>> Occupancy::cdf() const {
  std::vector<std::pair<double, double>> out;
  out.reserve(time.size());
  double acc = below;
  for (std::size_t i = 0; i < time.size(); ++i) {
    acc += time[i];
    out.emplace_back(lo + width * static_cast<double>(i + 1), total > 0.0 ? acc / total : 0.0);
  }
  return out;
}

double Occupancy::cdf_at(double z) const {
  if (total <= 0.0) return 0.0;
  if (z < lo) return 0.0;
  double acc = below;
  const double pos = (z - lo) / width;
  const std::size_t full = std::min(time.size(), static_cast<std::size_t>(pos));
  for (std::size_t i = 0; i < full; ++i) acc += time[i];
  if (full < time.size()) acc += time[full] * (pos - static_cast<double>(full));
  else acc += z == std::numeric_limits<double>::infinity() ? above : 0.0;
  return acc / total;
}

namespace {

constexpr std::size_t kChunk = 256;
constexpr std::size_t kIncrementBlock = 64;

struct FillOutcome {
  double w = 0.0;
  double landing = 0.0;  // relative to the start
  double pen_disc = 0.0;
  double pen_und = 0.0;
};

double discount_integral(double alpha, double t0, double u) {
  if (alpha == 0.0) return u;
  return std::exp(-alpha * t0) * -std::expm1(-alpha * u) / alpha;
}

FillOutcome fill_exact(const IGParams& p, double x, double L, RngStream& rng, double step,
                       double alpha, const PenaltyFn* g, Occupancy* occ) {
  const double mu = p.mu();
  const double sigma = p.sigma();
  const double s2 = p.sigma2();
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(L / step)));
  const double h = L / static_cast<double>(n);
  const double sh = std::sqrt(h);
  double X = 0.0;
  double running = 0.0;
  FillOutcome out;
  for (std::size_t k = 0; k < n; ++k) {
    const double xb = X + mu * h + sigma * sh * rng.normal();
    const double d = xb - X;
    const double seg = 0.5 * (X + xb + std::sqrt(d * d - 2.0 * s2 * h * std::log(rng.uniform())));
    const double next = std::max(running, seg);
    const double dm = next - running;
    if (dm > 0.0) {
      const double lo = x + h * static_cast<double>(k);
      if (g != nullptr) {
        const double rate = (*g)(lo + 0.5 * h);
        out.pen_disc += rate * discount_integral(alpha, running, dm);
        out.pen_und += rate * dm;
      }
      if (occ != nullptr) occ->add_interval(lo, lo + h, dm);
    }
    running = next;
    X = xb;
  }
  out.w = running;
  const double gap = running - X;
  out.landing = L + (gap > 0.0 ? sample_inverse_gaussian(gap / mu, gap * gap / s2, rng) : 0.0);
  return out;
}

FillOutcome fill_time_grid(const IGParams& p, double x, double L, RngStream& rng, double dt,
                           int refine_factor, int refine_levels, double alpha, const PenaltyFn* g,
                           Occupancy* occ) {
  double t = 0.0;
  double level = 0.0;
  FillOutcome out;
  for (;;) {
    double h = dt;
    for (int j = 0; j < refine_levels && L - level < 3.0 * h / p.mu(); ++j) h /= refine_factor;
    const double inc = sample_increment(p, h, rng);
    if (g != nullptr) {
      const double rate = (*g)(x + level);
      out.pen_disc += rate * discount_integral(alpha, t, h);
      out.pen_und += rate * h;
    }
    if (occ != nullptr) occ->add_interval(x + level, x + level, h);
    t += h;
    level += inc;
    if (level >= L) break;
  }
  out.w = t;
  out.landing = level;
  return out;
}

struct ReleaseOutcome {
  double duration = 0.0;
  bool exceeded = false;
  double pen_disc = 0.0;
  double pen_und = 0.0;
  double time_disc = 0.0;  // ∫ e^{-αt} dt over the release, from the cycle start
};

class IncrementBuffer {
 public:
  IncrementBuffer(const IGParams& p, double h, RngStream& rng) : p_(p), h_(h), rng_(rng) {}
  double next() {
    if (pos_ == kIncrementBlock) {
      sample_increments(p_, h_, rng_, buf_);
      pos_ = 0;
    }
    return buf_[pos_++];
  }

 private:
  const IGParams& p_;
  double h_;
  RngStream& rng_;
  std::array<double, kIncrementBlock> buf_{};
  std::size_t pos_ = kIncrementBlock;
};

ReleaseOutcome release(const IGParams& p, double M, double tau, double z0, double t0,
                       RngStream& rng, double h, double horizon, double alpha,
                       const PenaltyFn* gs, Occupancy* occ) {
  ReleaseOutcome out;
  IncrementBuffer incs(p, h, rng);
  double z = z0;
  double t = 0.0;
  auto drain = [&](double u) {
    const double lo = z - M * u;
    const double disc = discount_integral(alpha, t0 + t, u);
    out.time_disc += disc;
    if (gs != nullptr) {
      const double rate = (*gs)(z - 0.5 * M * u);
      out.pen_disc += rate * disc;
      out.pen_und += rate * u;
    }
    if (occ != nullptr) occ->add_interval(lo, z, u);
    t += u;
  };
  const double eps = 1e-13 * std::max(1.0, tau);
  while (z - tau > eps) {
    if (t > horizon) {
      out.exceeded = true;
      break;
    }
    if (z - M * h > tau) {
      drain(h);
      z = z - M * h + incs.next();
    } else {
      const double s = (z - tau) / M;
      drain(s);
      z = tau + sample_increment(p, s, rng);
    }
  }
  if (!out.exceeded && z > tau) drain((z - tau) / M);
  out.duration = t;
  return out;
}

CycleRecord run_cycle(const IGParams& p, const Policy& pol, const CostParams& cost,
                      const SimConfig& sim, double start, std::uint64_t index, RngStream& rng,
                      Occupancy* occ) {
  const double alpha = cost.alpha;
  const double M = pol.M;
  CycleRecord rec;
  rec.index = index;
  rec.start = start;
  const PenaltyFn* g = cost.g.is_zero() ? nullptr : &cost.g;
  const PenaltyFn* gs = cost.g_star.is_zero() ? nullptr : &cost.g_star;

  FillOutcome fill;
  if (start < pol.lambda) {
    const double L = pol.lambda - start;
    fill = sim.fill_mode == FillMode::exact
               ? fill_exact(p, start, L, rng, sim.dt, alpha, g, occ)
               : fill_time_grid(p, start, L, rng, sim.dt, sim.refine_factor, sim.refine_levels,
                                alpha, g, occ);
  }
  rec.w_lambda = fill.w;
  rec.landing = start + fill.landing;

  const ReleaseOutcome rel =
      release(p, M, pol.tau, rec.landing, rec.w_lambda, rng, sim.dt, sim.horizon, alpha, gs, occ);
  rec.w_tau_star = rel.duration;
  rec.horizon_exceeded = rel.exceeded;
  rec.length = rec.w_lambda + rec.w_tau_star;
  rec.discount = std::exp(-alpha * rec.length);

  const double at_switch_on = std::exp(-alpha * rec.w_lambda);
  rec.discounted.switching = M * (cost.k2 + cost.k1 * at_switch_on);
  rec.discounted.penalty_fill = fill.pen_disc;
  rec.discounted.penalty_release = rel.pen_disc;
  rec.discounted.reward = -cost.r * M * rel.time_disc;
  rec.undiscounted.switching = M * (cost.k1 + cost.k2);
  rec.undiscounted.penalty_fill = fill.pen_und;
  rec.undiscounted.penalty_release = rel.pen_und;
  rec.undiscounted.reward = -cost.r * M * rel.duration;
  return rec;
}

Occupancy make_occupancy(const IGParams& p, const Policy& pol, const SimConfig& sim) {
  Occupancy o;
  o.lo = pol.tau;
  double hi = sim.occupancy_max;
  if (hi <= pol.tau)
    hi = pol.lambda + (pol.lambda - pol.tau) + 40.0 * p.sigma2() / (p.mu() * p.mu());
  o.width = (hi - pol.tau) / sim.occupancy_bins;
  o.time.assign(static_cast<std::size_t>(sim.occupancy_bins), 0.0);
  return o;
}

constexpr std::uint64_t kFirstCycleDomain = 0x5eed0f1257c7c1e5ULL;

}  // namespace

FillSample simulate_fill(const IGParams& p, double L, RngStream& rng, FillMode mode, double dt,
                         int refine_factor, int refine_levels) {
  require(L > 0.0, "fill level must be positive");
  require(dt > 0.0, "dt must be positive");
  const FillOutcome f = mode == FillMode::exact
                            ? fill_exact(p, 0.0, L, rng, dt, 0.0, nullptr, nullptr)
                            : fill_time_grid(p, 0.0, L, rng, dt, refine_factor, refine_levels, 0.0,
                                             nullptr, nullptr);
  return {f.w, f.landing};
}

double simulate_release(const IGParams& p, double M, double d, RngStream& rng, double horizon) {
  require(M > 0.0, "release rate must be positive");
  require(d >= 0.0, "release start must be >= tau");
  if (d == 0.0) return 0.0;
  // the step only decides when to switch to exact iteration; use the drain scale
  const double h = std::max(d / M, 1e-3) / 16.0;
  const ReleaseOutcome r = release(p, M, 0.0, d, 0.0, rng, h, horizon, 0.0, nullptr, nullptr);
  return r.exceeded ? std::numeric_limits<double>::infinity() : r.duration;
}

SimResult simulate_cycles(const IGParams& p, const Policy& policy, const CostParams& cost,
                          const SimConfig& sim) {
  policy.validate();
  cost.validate();
  sim.validate();
  SimResult res{p, policy, cost, sim, {}, {}, make_occupancy(p, policy, sim), 0, 0.0, 0};
  const unsigned threads = resolve_threads(sim.threads);
  const std::size_t min_chunks = static_cast<std::size_t>((sim.n_cycles + kChunk - 1) / kChunk);
  constexpr std::size_t kMaxChunks = 1u << 20;

  struct ChunkOut {
    std::vector<CycleRecord> records;
    std::vector<Occupancy> occ;
  };
  double elapsed = 0.0;
  std::size_t done = 0;
  bool burned = sim.burn_in <= 0.0;
  auto satisfied = [&] { return res.cycles.size() >= sim.n_cycles && elapsed >= sim.min_total_time; };
  while (!satisfied() && done < kMaxChunks) {
    const std::size_t batch = std::max<std::size_t>(threads, done < min_chunks ? min_chunks - done : 1);
    std::vector<ChunkOut> outs(batch);
    parallel_for(batch, threads, [&](std::size_t b) {
      ChunkOut& o = outs[b];
      const std::uint64_t base = (done + b) * kChunk;
      o.records.reserve(kChunk);
      o.occ.assign(kChunk, make_occupancy(p, policy, sim));
      for (std::size_t j = 0; j < kChunk; ++j) {
        RngStream rng(sim.seed, base + j);
        o.records.push_back(run_cycle(p, policy, cost, sim, policy.tau, base + j, rng, &o.occ[j]));
      }
    });
    // merge strictly in cycle order and stop at the first cycle that meets
    // both targets, so the result does not depend on the batch size
    for (std::size_t b = 0; b < batch && !satisfied(); ++b) {
      for (std::size_t j = 0; j < kChunk && !satisfied(); ++j) {
        const CycleRecord& rec = outs[b].records[j];
        if (burned) {
          res.occupancy.merge(outs[b].occ[j]);
        } else {
          ++res.burn_in_cycles;
          if (elapsed + rec.length >= sim.burn_in) burned = true;
        }
        elapsed += rec.length;
        if (rec.horizon_exceeded) ++res.horizon_exceeded;
        res.cycles.push_back(rec);
      }
    }
    done += batch;
  }
  res.total_time = elapsed;

  if (sim.start && *sim.start != policy.tau) {
    const std::size_t n = res.cycles.size();
    res.first_cycles.resize(n);
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
      for (std::size_t j = c * kChunk; j < std::min(n, (c + 1) * kChunk); ++j) {
        RngStream rng(mix_seed(sim.seed, kFirstCycleDomain), j);
        res.first_cycles[j] = run_cycle(p, policy, cost, sim, *sim.start, j, rng, nullptr);
      }
    });
  }
  return res;
}

namespace {

Estimate mean_se(const std::vector<double>& v) {
  Estimate e;
  e.n = v.size();
  if (v.empty()) return e;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  e.value = mean;
  e.se = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))
                      : 0.0;
  return e;
}

}  // namespace

Estimate estimate_discounted(const SimResult& r) {
  require(r.cost.alpha > 0.0, "discounted estimate needs alpha > 0");
  // trajectories from τ: chain consecutive cycles until the discount is negligible
  std::vector<double> values;
  double value = 0.0;
  double disc = 1.0;
  for (const CycleRecord& c : r.cycles) {
    value += disc * c.cost_discounted();
    disc *= c.discount;
    if (disc < 1e-10) {
      values.push_back(value);
      value = 0.0;
      disc = 1.0;
    }
  }
  const Estimate from_tau = mean_se(values);
  if (r.first_cycles.empty()) return from_tau;
  // V_x = C_1 + D_1 V_τ with (C_1, D_1) independent of V_τ
  std::vector<double> combined;
  combined.reserve(r.first_cycles.size());
  double dsum = 0.0;
  for (const CycleRecord& c : r.first_cycles) {
    combined.push_back(c.cost_discounted() + c.discount * from_tau.value);
    dsum += c.discount;
  }
  Estimate e = mean_se(combined);
  const double dbar = dsum / static_cast<double>(r.first_cycles.size());
  e.se = std::sqrt(e.se * e.se + dbar * dbar * from_tau.se * from_tau.se);
  return e;
}

Estimate estimate_cycle_transform(const SimResult& r) {
  std::vector<double> v;
  v.reserve(r.cycles.size());
  for (const CycleRecord& c : r.cycles) v.push_back(c.discount);
  return mean_se(v);
}

std::optional<Estimate> estimate_average(const SimResult& r) {
  if (r.horizon_exceeded > 0 || r.cycles.size() < 2) return std::nullopt;
  const double n = static_cast<double>(r.cycles.size());
  double ys = 0.0, xs = 0.0;
  for (const CycleRecord& c : r.cycles) {
    ys += c.cost_undiscounted();
    xs += c.length;
  }
  const double ratio = ys / xs;
  const double xbar = xs / n;
  double ss = 0.0;
  for (const CycleRecord& c : r.cycles) {
    const double d = c.cost_undiscounted() - ratio * c.length;
    ss += d * d;
  }
  Estimate e;
  e.value = ratio;
  e.se = std::sqrt(ss / (n - 1.0) / n) / xbar;
  e.n = r.cycles.size();
  return e;
}

Estimate estimate_cycle_mean(const SimResult& r) {
  std::vector<double> v;
  v.reserve(r.cycles.size());
  for (const CycleRecord& c : r.cycles) v.push_back(c.length);
  return mean_se(v);
}

std::vector<std::pair<double, double>> estimate_stationary(const SimResult& r) {
  if (r.policy.M * r.params.mu() <= 1.0)
    throw DivergenceError("no stationary distribution when mu*M <= 1");
  if (r.occupancy.total <= 0.0)
    throw DomainError("no simulated time left after burn-in");
  return r.occupancy.cdf();
}

}  // namespace dam
