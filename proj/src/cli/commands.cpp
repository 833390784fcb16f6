#include "dam/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "dam/cli/output.hpp"
#include "dam/cost_model.hpp"
#include "dam/optimizer.hpp"
#include "dam/overshoot.hpp"
#include "dam/parallel.hpp"
#include "dam/simulator.hpp"

namespace dam::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

ojson describe(const RunConfig& c) {
  ojson j;
  j["process"] = {{"mu", c.process.mu()}, {"sigma2", c.process.sigma2()}};
  j["policy"] = {{"lambda", c.policy.lambda}, {"tau", c.policy.tau}, {"M", c.policy.M}};
  j["cost"] = {{"k1", c.cost.k1},
               {"k2", c.cost.k2},
               {"r", c.cost.r},
               {"alpha", c.cost.alpha},
               {"g", c.cost.g.describe()},
               {"g_star", c.cost.g_star.describe()}};
  return j;
}

ojson breakdown(const CostBreakdown& b) {
  return {{"switching", b.switching},
          {"reward", b.reward},
          {"penalty_fill", b.penalty_fill},
          {"penalty_release", b.penalty_release},
          {"total", b.total()}};
}

ojson estimate(const Estimate& e) { return {{"value", e.value}, {"se", e.se}, {"n", e.n}}; }

const char* const kInfinite = "infinite";

}  // namespace

int cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  const CostModel model(cfg.process, cfg.policy, cfg.cost, cfg.quadrature);
  const double x = cfg.start_level();
  const PolicyEvaluation ev = model.evaluate(x);

  ojson j = describe(cfg);
  j["start"] = x;
  if (ev.discounted) {
    j["discounted"] = breakdown(*ev.discounted);
    j["cycle_transform_start"] = *ev.cycle_transform_start;
    j["cycle_transform_tau"] = *ev.cycle_transform_tau;
  } else {
    j["discounted"] = nullptr;  // alpha = 0
  }
  j["cycle_mean"] = number_or_infinite(ev.cycle_mean.as_double());
  j["average"] = ev.average ? breakdown(*ev.average) : ojson(kInfinite);

  CsvWriter csv("evaluation", {"objective", "switching", "reward", "penalty_fill", "penalty_release", "total"});
  if (ev.discounted) {
    const auto& b = *ev.discounted;
    csv.row({"discounted", fmt(b.switching), fmt(b.reward), fmt(b.penalty_fill), fmt(b.penalty_release),
             fmt(b.total())});
  }
  if (ev.average) {
    const auto& b = *ev.average;
    csv.row({"average", fmt(b.switching), fmt(b.reward), fmt(b.penalty_fill), fmt(b.penalty_release),
             fmt(b.total())});
  } else {
    csv.row({"average", kInfinite, kInfinite, kInfinite, kInfinite, kInfinite});
  }

  const fs::path out(cfg.output_dir);
  write_json(out / "evaluation.json", j);
  write_atomic(out / "evaluation.csv", csv.str());

  if (ev.discounted_total) log << "discounted total from x=" << fmt(x) << ": " << fmt(*ev.discounted_total) << "\n";
  log << "average cost: " << (ev.average ? fmt(ev.average->total()) : std::string(kInfinite)) << "\n";
  log << "mean cycle length: " << (ev.cycle_mean.is_finite() ? fmt(ev.cycle_mean.value()) : kInfinite) << "\n";
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, unsigned threads, std::ostream& log) {
  SimConfig sim = cfg.simulation;
  sim.start = cfg.start;
  sim.threads = threads;
  const SimResult r = simulate_cycles(cfg.process, cfg.policy, cfg.cost, sim);

  CsvWriter cycles("cycles", {"index", "w_lambda", "landing", "w_tau_star", "discounted_cost", "horizon_exceeded"});
  for (std::size_t i = 0; i < r.cycles.size(); ++i) {
    const CycleRecord& c = r.cycles[i];
    cycles.row({std::to_string(i), fmt(c.w_lambda), fmt(c.landing), fmt(c.w_tau_star), fmt(c.cost_discounted()),
                c.horizon_exceeded ? "1" : "0"});
  }

  ojson j = describe(cfg);
  j["seed"] = sim.seed;
  j["cycles"] = r.cycles.size();
  j["total_time"] = r.total_time;
  j["horizon_exceeded"] = r.horizon_exceeded;
  j["burn_in_cycles"] = r.burn_in_cycles;
  if (cfg.cost.alpha > 0.0) {
    j["discounted_total"] = estimate(estimate_discounted(r));
    j["start"] = cfg.start_level();
    j["cycle_transform"] = estimate(estimate_cycle_transform(r));
  }
  const auto avg = estimate_average(r);
  j["average"] = avg ? estimate(*avg) : ojson(kInfinite);
  j["cycle_mean"] = estimate(estimate_cycle_mean(r));

  CsvWriter occ("occupancy", {"bin_lo", "bin_hi", "time", "F_empirical"});
  const Occupancy& o = r.occupancy;
  double acc = o.below;
  for (std::size_t i = 0; i < o.time.size(); ++i) {
    acc += o.time[i];
    const double lo = o.lo + o.width * static_cast<double>(i);
    occ.row(std::vector<double>{lo, lo + o.width, o.time[i], o.total > 0.0 ? acc / o.total : 0.0});
  }

  const fs::path out(cfg.output_dir);
  write_atomic(out / "cycles.csv", cycles.str());
  write_json(out / "estimates.json", j);
  write_atomic(out / "occupancy.csv", occ.str());

  log << r.cycles.size() << " cycles, " << fmt(r.total_time) << " time units";
  if (r.horizon_exceeded) log << ", " << r.horizon_exceeded << " hit the horizon";
  log << "\n";
  if (avg) log << "average cost: " << fmt(avg->value) << " +- " << fmt(avg->se) << "\n";
  return kOk;
}

int cmd_validate(const RunConfig& cfg, const ValidationOptions& opt, std::ostream& log) {
  const ValidationReport rep = run_identities(cfg, opt);
  CsvWriter csv("validation", {"status", "group", "identity", "lhs", "rhs", "residual", "tolerance", "kind", "note"});
  for (const auto& c : rep.checks) {
    std::string note = c.note;
    for (char& ch : note)
      if (ch == ',' || ch == '\n') ch = ';';
    csv.row({c.status == CheckStatus::pass ? "pass" : c.status == CheckStatus::fail ? "fail" : "skip", c.group,
             c.name, fmt(c.lhs), fmt(c.rhs), fmt(c.residual), fmt(c.tolerance), c.relative ? "rel" : "abs", note});
  }
  write_atomic(fs::path(cfg.output_dir) / "validation.csv", csv.str());
  log << rep.table();
  return rep.passed() ? kOk : kValidationFailed;
}

int cmd_optimize(const RunConfig& cfg, unsigned threads, std::ostream& log) {
  SearchSpec spec = cfg.search;
  spec.M = cfg.policy.M;
  spec.threads = threads;
  const OptimizeResult res = optimize(cfg.process, cfg.cost, spec, cfg.quadrature);

  CsvWriter trace("trace", {"round", "lambda", "tau", "value"});
  for (const auto& t : res.trace)
    trace.row({std::to_string(t.round), fmt(t.lambda), fmt(t.tau), std::isinf(t.value) ? kInfinite : fmt(t.value)});

  ojson j = describe(cfg);
  j.erase("policy");
  j["objective"] = spec.objective == Objective::average ? "average" : "discounted";
  if (spec.start) j["start"] = *spec.start;
  j["feasible"] = res.feasible;
  if (res.feasible) {
    j["best"] = {{"lambda", res.lambda}, {"tau", res.tau}, {"M", spec.M}, {"value", res.value}};
    j["cell"] = {{"lambda", res.cell_lambda}, {"tau", res.cell_tau}};
  } else {
    j["reason"] = res.reason;
  }
  j["evaluations"] = res.trace.size();

  const fs::path out(cfg.output_dir);
  write_atomic(out / "trace.csv", trace.str());
  write_json(out / "best.json", j);

  if (res.feasible)
    log << "best lambda=" << fmt(res.lambda) << " tau=" << fmt(res.tau) << " value=" << fmt(res.value) << "\n";
  else
    log << "no finite optimum: " << res.reason << "\n";
  return kOk;
}

int cmd_stationary(const RunConfig& cfg, unsigned threads, std::ostream& log) {
  const IGParams& p = cfg.process;
  const Policy& pol = cfg.policy;
  if (p.mu() * pol.M <= 1.0) throw DomainError("stationary law needs mu*M > 1 (policy.M, process.mu)");
  double zmax = cfg.stationary.z_max;
  if (zmax <= 0.0) {
    const OvershootLaw law(p, pol.lambda - pol.tau, cfg.quadrature);
    double s = law.level() + 1.0;
    while (law.sf(s) > 1e-4) s = law.level() + 2.0 * (s - law.level());
    zmax = pol.tau + s;
  }
  const int n = cfg.stationary.points;
  std::vector<double> z(static_cast<std::size_t>(n)), fa(z.size());
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = pol.tau + (zmax - pol.tau) * i / (n - 1);
  parallel_for(z.size(), threads, [&](std::size_t i) { fa[i] = stationary_cdf(p, pol, z[i], cfg.quadrature); });

  std::optional<Occupancy> occ;
  if (cfg.stationary.simulate) {
    SimConfig sim = cfg.simulation;
    sim.threads = threads;
    sim.start.reset();
    occ = simulate_cycles(p, pol, cfg.cost, sim).occupancy;
  }

  std::vector<std::string> cols = {"z", "F_analytic"};
  if (occ) cols.insert(cols.end(), {"F_empirical", "gap"});
  CsvWriter csv("stationary", cols);
  double sup = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!occ) {
      csv.row(std::vector<double>{z[i], fa[i]});
      continue;
    }
    const double fe = occ->cdf_at(z[i]);
    const double gap = std::fabs(fa[i] - fe);
    sup = std::max(sup, gap);
    csv.row(std::vector<double>{z[i], fa[i], fe, gap});
  }
  write_atomic(fs::path(cfg.output_dir) / "stationary.csv", csv.str());
  log << n << " points on [" << fmt(pol.tau) << ", " << fmt(zmax) << "]";
  if (occ) log << ", sup gap " << fmt(sup);
  log << "\n";
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dam release policy toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  unsigned threads = 1;
  std::string fault;
  app.add_option("--config", config_path, "configuration file (key = value sections, or JSON)");
  app.add_option("--seed", seed, "simulation seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads, 0 for all cores");

  auto* evaluate = app.add_subcommand("evaluate", "discounted and average cost of the configured policy");
  auto* simulate = app.add_subcommand("simulate", "simulate cycles and estimate costs");
  auto* validate = app.add_subcommand("validate", "run the identity suite");
  validate->add_option("--inject-fault", fault, "negative control")->check(CLI::IsMember({"sign-flip"}));
  auto* optimize = app.add_subcommand("optimize", "search the (lambda, tau) region");
  auto* stationary = app.add_subcommand("stationary", "stationary content distribution");
  for (auto* sub : {evaluate, simulate, validate, optimize, stationary}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  RunConfig cfg;
  try {
    cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) cfg.simulation.seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (evaluate->parsed()) return cmd_evaluate(cfg, out);
    if (simulate->parsed()) return cmd_simulate(cfg, threads, out);
    if (validate->parsed()) return cmd_validate(cfg, ValidationOptions{fault == "sign-flip"}, out);
    if (optimize->parsed()) return cmd_optimize(cfg, threads, out);
    return cmd_stationary(cfg, threads, out);
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailed;
  }
}

}  // namespace dam::cli
