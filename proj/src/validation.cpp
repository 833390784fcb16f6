#include "dam/cli/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <sstream>

#include "dam/cli/output.hpp"
#include "dam/cost_model.hpp"
#include "dam/overshoot.hpp"
#include "dam/passage.hpp"
#include "dam/quadrature.hpp"
#include "dam/resolvents.hpp"

namespace dam::cli {
namespace {

class Suite {
 public:
  explicit Suite(ValidationReport& rep) : rep_(rep) {}

  void group(std::string g) { group_ = std::move(g); }

  // lhs is computed inside so that exceptions become failures, not aborts
  void close(const std::string& name, const std::function<double()>& lhs, double rhs, double tol,
             bool relative = true) {
    IdentityCheck c{group_, name, 0.0, rhs, 0.0, tol, relative, CheckStatus::pass, {}};
    try {
      c.lhs = lhs();
      const double diff = std::fabs(c.lhs - rhs);
      c.residual = relative ? diff / std::max(std::fabs(rhs), 1e-300) : diff;
      if (!(c.residual <= tol)) c.status = CheckStatus::fail;
      if (rhs == 0.0 && relative) {
        c.residual = diff;
        c.relative = false;
        c.status = diff <= tol ? CheckStatus::pass : CheckStatus::fail;
      }
    } catch (const std::exception& e) {
      c.status = CheckStatus::fail;
      c.lhs = std::nan("");
      c.residual = std::nan("");
      c.note = e.what();
    }
    rep_.checks.push_back(std::move(c));
  }

  void truth(const std::string& name, const std::function<bool()>& ok, const std::string& note = {}) {
    IdentityCheck c{group_, name, 1.0, 1.0, 0.0, 0.0, false, CheckStatus::pass, note};
    try {
      if (!ok()) {
        c.status = CheckStatus::fail;
        c.lhs = 0.0;
        c.residual = 1.0;
      }
    } catch (const std::exception& e) {
      c.status = CheckStatus::fail;
      c.lhs = 0.0;
      c.residual = 1.0;
      c.note = e.what();
    }
    rep_.checks.push_back(std::move(c));
  }

  void skip(const std::string& name, const std::string& reason) {
    rep_.checks.push_back(IdentityCheck{group_, name, 0.0, 0.0, 0.0, 0.0, false, CheckStatus::skipped, reason});
  }

 private:
  ValidationReport& rep_;
  std::string group_;
};

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

}  // namespace

bool ValidationReport::passed() const { return count(CheckStatus::fail) == 0; }

std::size_t ValidationReport::count(CheckStatus s) const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [s](const IdentityCheck& c) { return c.status == s; }));
}

std::string ValidationReport::table() const {
  std::ostringstream o;
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-12s %-44s %14s %14s %11s %9s\n", "status", "group", "identity", "lhs",
                "rhs", "residual", "tol");
  o << line;
  for (const auto& c : checks) {
    const char* st = c.status == CheckStatus::pass ? "PASS" : c.status == CheckStatus::fail ? "FAIL" : "SKIP";
    if (c.status == CheckStatus::skipped) {
      std::snprintf(line, sizeof line, "%-6s %-12s %-44s  (%s)\n", st, c.group.c_str(), c.name.c_str(),
                    c.note.c_str());
      o << line;
      continue;
    }
    std::snprintf(line, sizeof line, "%-6s %-12s %-44s %14s %14s %11s %9s%s\n", st, c.group.c_str(), c.name.c_str(),
                  num(c.lhs).c_str(), num(c.rhs).c_str(), num(c.residual).c_str(),
                  (num(c.tolerance) + (c.relative ? "r" : "a")).c_str(), c.note.empty() ? "" : "  !");
    o << line;
    if (!c.note.empty() && c.status == CheckStatus::fail) o << "       " << c.note << "\n";
  }
  o << count(CheckStatus::pass) << " passed, " << count(CheckStatus::fail) << " failed, "
    << count(CheckStatus::skipped) << " skipped\n";
  return o.str();
}

ValidationReport run_identities(const RunConfig& cfg, const ValidationOptions& opt) {
  ValidationReport rep;
  Suite s(rep);
  const IGParams& p = cfg.process;
  const Policy& pol = cfg.policy;
  const QuadConfig& qc = cfg.quadrature;
  const double mu = p.mu(), s2 = p.sigma2();
  const double lam = pol.lambda, tau = pol.tau, M = pol.M;
  const bool ergodic = mu * M > 1.0;
  const std::string why = "mu*M <= 1: cycles have infinite mean, no average cost";
  auto resolvent = [&](double a) {
    ResolventDensity r(p, a);
    return opt.sign_flip ? r.with_sign_flip() : r;
  };
  auto tag = [](std::initializer_list<std::pair<const char*, double>> kv) {
    std::string t;
    for (const auto& [k, v] : kv) t += (t.empty() ? "" : ",") + std::string(k) + "=" + num(v);
    return t;
  };

  s.group("resolvent");
  for (double a : {0.0, 0.5, 1.0, 2.0})
    for (double b : {0.0, 0.5, 1.0, 2.0}) {
      const auto r = resolvent(a);
      if (a == 0.0 && b == 0.0) {
        s.truth("transform diverges at " + tag({{"a", a}, {"b", b}}), [&] {
          if (!r.transform(0.0).is_infinite()) return false;
          try {
            transform_by_quadrature(r, 0.0, qc);
          } catch (const DivergenceError&) {
            return true;
          }
          return false;
        });
        continue;
      }
      const double closed = s2 / (a * s2 + std::sqrt(2.0 * b * s2 + mu * mu) - mu);
      s.close("transform " + tag({{"a", a}, {"b", b}}), [&] { return transform_by_quadrature(r, b, qc); }, closed,
              1e-6);
    }

  s.group("fill");
  const double xs[] = {tau, 0.5 * (tau + lam)};
  for (double x : xs)
    for (double a : {0.2, 1.0}) {
      const double lt = lt_w_lambda(p, x, lam, a);
      s.close("a*tail(u) = E e^-aW " + tag({{"x", x}, {"a", a}}),
              [&] { return a * tail_integral(resolvent(a), 0.0, lam - x, qc); }, lt, 1e-6);
      s.close("occupation(1) = (1-E e^-aW)/a " + tag({{"x", x}, {"a", a}}),
              [&] { return integrate_resolvent(resolvent(a), PenaltyFn::constant(1.0), x, lam, qc); }, (1.0 - lt) / a,
              1e-5);
    }
  s.close("occupation(1) = E W at a=0", [&] {
    return integrate_resolvent(resolvent(0.0), PenaltyFn::constant(1.0), tau, lam, qc);
  }, mean_w_lambda(p, tau, lam), 1e-5);
  s.close("E e^-aW = 1 at x=lambda", [&] { return lt_w_lambda(p, lam, lam, 0.5); }, 1.0, 0.0, false);

  s.group("eta");
  double worst = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double a = 0.25 * i;
    worst = std::max(worst, std::fabs(eta_residual(p, M, a, eta(p, M, a))));
  }
  s.close("max residual over a in [0,10]", [&] { return worst; }, 0.0, 1e-10, false);
  s.truth("eta(0) = 0 iff mu*M > 1", [&] { return (eta(p, M, 0.0) == 0.0) == ergodic; });

  s.group("release");
  const double ds[] = {lam - tau, lam - tau + 1.0};
  for (double d : ds) {
    const double x = tau + d;
    s.close("mass = P(W* < inf) " + tag({{"x", x}}), [&] {
      return quad::integrate_to_infinity(quad::pointwise([&](double t) { return pdf_w_tau_star(p, M, x, tau, t); }),
                                         d / M, std::max(1.0, d / M), qc, true)
          .value;
    }, prob_w_tau_star_finite(p, M, x, tau), 1e-6);
    for (double a : {0.2, 1.0}) {
      s.close("killed occupation(1) " + tag({{"x", x}, {"a", a}}), [&] {
        const KilledResolvent kr(p, pol, a, qc);
        return killed_occupation(kr, PenaltyFn::constant(1.0), x);
      }, (1.0 - lt_w_tau_star(p, M, x, tau, a)) / a, 1e-5);
    }
    if (ergodic)
      s.close("killed occupation(1) = E W* at a=0 " + tag({{"x", x}}), [&] {
        const KilledResolvent kr(p, pol, 0.0, qc);
        return killed_occupation(kr, PenaltyFn::constant(1.0), x);
      }, mean_var_w_tau_star(p, M, x, tau).mean.value(), 1e-5);
    else
      s.skip("killed occupation(1) = E W* at a=0 " + tag({{"x", x}}), "mu*M <= 1: release time has no mean");
  }

  s.group("overshoot");
  const OvershootLaw law(p, lam - tau, qc);
  double cut = law.level() + 1.0;
  while (law.sf(cut) > 1e-13) cut = law.level() + 2.0 * (cut - law.level());
  auto pdf_integral = [&](const std::function<double(double)>& h) {
    return quad::integrate_sqrt_left(quad::pointwise([&](double v) { return h(v) * law.pdf(v); }), law.level(), cut,
                                     qc)
        .value;
  };
  s.close("pdf mass", [&] { return pdf_integral([](double) { return 1.0; }) + law.sf(cut); }, 1.0, 1e-4, false);
  s.close("pdf mean", [&] { return pdf_integral([](double v) { return v; }); }, law.mean(), 1e-4);
  for (double a : {0.0, 0.5})
    for (double b : {0.0, 0.7}) {
      if (a == 0.0 && b == 0.0) continue;
      s.close("joint transform by kernel " + tag({{"a", a}, {"b", b}}),
              [&] { return law.expect([b](double v) { return std::exp(-b * v); }, a); }, law.joint_transform(a, b),
              1e-6);
    }
  s.close("joint transform at b=0", [&] { return law.joint_transform(0.5, 0.0); }, lt_w_lambda(p, tau, lam, 0.5),
          1e-6);
  for (double a : {0.0, 0.5})
    for (double off : {0.1, 1.0, 4.0}) {
      const double v = law.level() + off;
      s.close("landing kernel routes " + tag({{"a", a}, {"s", v}}),
              [&] { return law.landing_kernel(a, v, LandingRoute::factorization); },
              law.landing_kernel(a, v, LandingRoute::levy), 1e-6);
    }

  s.group("cycle");
  if (ergodic) {
    const double m = mean_cycle_length(p, pol).value();
    auto one_minus = [&](double a) { return (1.0 - cycle_transform(p, pol, a, tau, qc)) / a; };
    s.close("slope of E e^-aT at 0 = E T", [&] { return 2.0 * one_minus(1e-4) - one_minus(2e-4); }, m, 1e-3);

    CostParams avg = cfg.cost;
    avg.alpha = 0.0;
    CostParams disc = cfg.cost;
    disc.alpha = 1e-3;
    const double c = average_cost(p, pol, avg, qc).value();
    s.close("Tauberian a*C_a at a=1e-3", [&] { return 1e-3 * discounted_total_cost(p, pol, disc, cfg.start_level(), qc); },
            c, 0.02);
  } else {
    s.skip("slope of E e^-aT at 0 = E T", why);
    s.skip("Tauberian a*C_a at a=1e-3", why);
  }

  s.group("stationary");
  if (ergodic) {
    s.close("F(tau) = 0", [&] { return stationary_cdf(p, pol, tau, qc); }, 0.0, 0.0, false);
    double far = cut;
    while (law.sf(far) > 1e-7) far = law.level() + 2.0 * (far - law.level());
    far = tau + 2.0 * far;
    s.close("F(far) = 1 " + tag({{"z", far}}), [&] { return stationary_cdf(p, pol, far, qc); }, 1.0, 1e-3, false);
    s.truth("F monotone on [tau, lambda + 3 E overshoot]", [&] {
      const double hi = lam + 3.0 * (law.mean() - law.level()) + 1.0;
      double prev = 0.0;
      for (int i = 0; i <= 30; ++i) {
        const double f = stationary_cdf(p, pol, tau + (hi - tau) * i / 30.0, qc);
        if (f < prev - 1e-9 || f > 1.0 + 1e-9) return false;
        prev = f;
      }
      return true;
    });
  } else {
    s.skip("stationary law", why);
  }
  return rep;
}

}  // namespace dam::cli
