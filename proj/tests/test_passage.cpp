#include <cmath>
#include <initializer_list>
#include <vector>

#include "dam/common.hpp"
#include "dam/passage.hpp"
#include "dam/quadrature.hpp"
#include "dam/resolvents.hpp"
#include "dam/simulator.hpp"
#include "dam/special.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace dam;

TEST_SUITE("passage_laws") {
  TEST_CASE("policy validation") {
    CHECK_NOTHROW(Policy{2.0, 0.0, 1.0}.validate());
    CHECK_THROWS_AS((Policy{1.0, 1.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((Policy{1.0, -0.1, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((Policy{1.0, 0.0, 0.0}.validate()), DomainError);
    CHECK_THROWS_AS((Policy{INFINITY, 0.0, 1.0}.validate()), DomainError);
  }

  TEST_CASE("eta exponent") {
    const IGParams p(2.0, 1.0);
    CHECK(eta(p, 1.0, 0.0) == 0.0);
    const IGParams q(0.5, 1.0);
    CHECK(eta(q, 1.0, 0.0) == doctest::Approx(2.0 * 0.5 / 1.0).epsilon(1e-14));
    const double e = eta(p, 1.0, 0.5);
    CHECK(e == doctest::Approx(0.914213562373095048802).epsilon(1e-14));
    const double root = oracle::bisect(
        [&](double h) { return 1.0 * h - 0.5 - (std::sqrt(2.0 * h + 4.0) - 2.0); }, 0.5, 5.0);
    CHECK(std::fabs(e - root) < 1e-10);
    for (double M : {0.3, 1.0, 4.0})
      for (double a : {0.0, 0.1, 1.0, 10.0}) {
        CHECK(std::fabs(eta_residual(p, M, a, eta(p, M, a))) < 1e-10);
        CHECK(std::fabs(eta_residual(q, M, a, eta(q, M, a))) < 1e-10);
      }
    double prev = -1.0;
    for (double a = 0.0; a < 5.0; a += 0.25) {
      const double v = eta(p, 1.3, a);
      CHECK(v > prev);
      prev = v;
    }
  }

  TEST_CASE("fill transform endpoints") {
    const IGParams p(1.0, 1.0);
    CHECK(lt_w_lambda(p, 2.0, 2.0, 0.7) == 1.0);
    CHECK(lt_w_lambda(p, 0.0, 2.0, 0.0) == 1.0);
    CHECK(lt_w_lambda(p, 0.0, 2.0, 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(lt_w_lambda(p, 3.0, 2.0, 0.5), DomainError);
  }

  TEST_CASE("fill transform against the resolvent tail") {
    const QuadConfig cfg;
    for (double mu : {1.0, 2.0})
      for (double s2 : {0.5, 1.0, 3.0})
        for (double a : {0.1, 0.5, 2.0, 6.0})
          for (double L : {0.1, 1.0, 2.0, 5.0}) {
            const IGParams p(mu, s2);
            const ResolventDensity res(p, a);
            CAPTURE(mu);
            CAPTURE(s2);
            CAPTURE(a);
            CAPTURE(L);
            const double tail = a * tail_integral(res, 0.0, L, cfg);
            CHECK(lt_w_lambda(p, 0.0, L, a) == doctest::Approx(tail).epsilon(1e-8));
          }
    const IGParams p(1.0, 1.0);
    CHECK(lt_w_lambda(p, 0.0, 2.0, 0.5) == doctest::Approx(0.344277233275417708866).epsilon(1e-12));
  }

  TEST_CASE("fill transform at the removable pole") {
    const IGParams p(1.0, 0.5);
    const double pole = 2.0 * 1.0 / 0.5;
    const double at = lt_w_lambda(p, 0.0, 1.5, pole);
    const double lo = lt_w_lambda(p, 0.0, 1.5, pole * (1.0 - 1e-3));
    const double hi = lt_w_lambda(p, 0.0, 1.5, pole * (1.0 + 1e-3));
    CHECK(std::isfinite(at));
    CHECK(at < lo);
    CHECK(at > hi);
    const double tail = pole * tail_integral(ResolventDensity(p, pole), 0.0, 1.5, QuadConfig{});
    CHECK(at == doctest::Approx(tail).epsilon(1e-8));
  }

  TEST_CASE("fill transform monotonicity") {
    const IGParams p(1.2, 0.8);
    double prev = 1.0;
    for (double a = 0.05; a < 8.0; a += 0.05) {
      const double v = lt_w_lambda(p, 0.0, 2.0, a);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
    prev = 0.0;
    for (double x = 0.0; x <= 2.0; x += 0.1) {
      const double v = lt_w_lambda(p, x, 2.0, 0.7);
      CHECK(v >= prev);
      prev = v;
    }
  }

  TEST_CASE("fill time distribution") {
    const IGParams p(1.0, 1.0);
    CHECK(cdf_w_lambda(p, 0.0, 1.0, 0.0) == 0.0);
    CHECK(cdf_w_lambda(p, 0.0, 1.0, 1e4) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cdf_w_lambda(p, 0.0, 1.0, 1.0) == doctest::Approx(1.0 - 0.668102001223170606427).epsilon(1e-12));
    CHECK_THROWS_AS(cdf_w_lambda(p, 0.0, 1.0, -1.0), DomainError);
    double prev = 0.0;
    for (double t = 0.01; t < 6.0; t += 0.01) {
      const double c = cdf_w_lambda(p, 0.0, 1.5, t);
      CHECK(c >= prev);
      CHECK(c <= 1.0);
      prev = c;
    }
  }

  TEST_CASE("printed distribution expression agrees only at unit level") {
    const IGParams p(1.0, 1.0);
    for (double t : {0.3, 1.0, 2.5}) {
      CHECK(cdf_w_lambda_unscaled(p, 0.0, 1.0, t) == doctest::Approx(cdf_w_lambda(p, 0.0, 1.0, t)).epsilon(1e-12));
    }
    // pinned discrepancy at a level of 4
    CHECK(std::fabs(cdf_w_lambda_unscaled(p, 0.0, 4.0, 2.0) - cdf_w_lambda(p, 0.0, 4.0, 2.0)) > 0.05);
  }

  TEST_CASE("fill time distribution against sampled passages") {
    const IGParams p(1.0, 1.0);
    RngStream rng(11, 0);
    std::vector<double> w(100000);
    for (double& v : w) v = simulate_fill(p, 1.0, rng).w;
    const double crit = 1.628 / std::sqrt(1e5);
    CHECK(oracle::ks_distance(w, [&](double t) { return cdf_w_lambda(p, 0.0, 1.0, t); }) < crit);
  }

  TEST_CASE("fill time mean") {
    const IGParams p(1.0, 1.0);
    CHECK(mean_w_lambda(p, 1.0, 1.0) == 0.0);
    const double quad = oracle::simpson_sqrt([&](double y) { return u_alpha(ResolventDensity(p, 0.0), y); }, 0.0, 1.0, 20000);
    CHECK(mean_w_lambda(p, 0.0, 1.0) == doctest::Approx(quad).epsilon(1e-8));
    CHECK(mean_w_lambda(p, 0.0, 2.0) == doctest::Approx(2.47160493813486965568).epsilon(1e-12));
    // linear growth with offset σ²/(2μ)
    const IGParams q(1.5, 0.6);
    CHECK(mean_w_lambda(q, 0.0, 200.0) - 1.5 * 200.0 == doctest::Approx(0.6 / 3.0).epsilon(1e-8));
  }

  TEST_CASE("fill transforms and means by sampling") {
    const IGParams p(1.0, 1.0);
    RngStream rng(12, 0);
    std::vector<double> w(100000), e(100000);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = simulate_fill(p, 2.0, rng).w;
      e[i] = std::exp(-0.5 * w[i]);
    }
    const auto mw = oracle::mean_se(w);
    const auto me = oracle::mean_se(e);
    CHECK(std::fabs(mw.mean - mean_w_lambda(p, 0.0, 2.0)) < 3.0 * mw.se);
    CHECK(std::fabs(me.mean - lt_w_lambda(p, 0.0, 2.0, 0.5)) < 3.0 * me.se);
  }

  TEST_CASE("derivative of the fill transform is the mean") {
    for (double s2 : {0.5, 1.0, 2.0}) {
      const IGParams p(1.3, s2);
      const double L = 1.7;
      auto slope = [&](double h) { return (1.0 - lt_w_lambda(p, 0.0, L, h)) / h; };
      const double rich = 2.0 * slope(1e-4) - slope(2e-4);
      CHECK(rich == doctest::Approx(mean_w_lambda(p, 0.0, L)).epsilon(1e-3));
    }
  }

  TEST_CASE("release transform") {
    const IGParams p(2.0, 1.0);
    CHECK(lt_w_tau_star(p, 1.0, 0.5, 0.5, 0.3) == 1.0);
    CHECK_THROWS_AS(lt_w_tau_star(p, 1.0, 0.2, 0.5, 0.3), DomainError);
    const IGParams q(0.5, 1.0);
    CHECK(lt_w_tau_star(q, 1.0, 1.0, 0.0, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(prob_w_tau_star_finite(q, 1.0, 1.0, 0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(prob_w_tau_star_finite(p, 1.0, 3.0, 0.0) == 1.0);

    RngStream rng(13, 0);
    std::vector<double> v(100000);
    for (double& x : v) x = std::exp(-0.3 * simulate_release(p, 1.0, 1.0, rng));
    const auto m = oracle::mean_se(v);
    CHECK(std::fabs(m.mean - lt_w_tau_star(p, 1.0, 1.0, 0.0, 0.3)) < 3.0 * m.se);
  }

  TEST_CASE("release density") {
    const IGParams p(2.0, 1.0);
    CHECK(pdf_w_tau_star(p, 1.0, 1.0, 0.0, 0.5) == 0.0);
    auto mass = [](const IGParams& q, double d) {
      QuadConfig cfg;
      return quad::integrate_to_infinity(
                 quad::pointwise([&](double t) { return pdf_w_tau_star(q, 1.0, d, 0.0, t); }), d, 1.0, cfg, true)
          .value;
    };
    CHECK(mass(p, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(mass(IGParams(0.5, 1.0), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
  }

  TEST_CASE("release mean and variance") {
    const IGParams p(2.0, 1.0);
    const auto zero = mean_var_w_tau_star(p, 1.0, 0.7, 0.7);
    CHECK(zero.mean.value() == 0.0);
    CHECK(zero.variance.value() == 0.0);
    const auto mv = mean_var_w_tau_star(p, 1.0, 1.0, 0.0);
    CHECK(mv.mean.value() == doctest::Approx(2.0));
    CHECK(mv.variance.value() == doctest::Approx(1.0));
    CHECK(mean_var_w_tau_star(IGParams(0.5, 1.0), 1.0, 1.0, 0.0).mean.is_infinite());
    CHECK(mean_var_w_tau_star(IGParams(1.0, 1.0), 1.0, 1.0, 0.0).variance.is_infinite());

    RngStream rng(14, 0);
    std::vector<double> v(100000);
    for (double& x : v) x = simulate_release(p, 1.0, 1.0, rng);
    const auto m = oracle::mean_se(v);
    const auto var = oracle::variance_se(v);
    CHECK(std::fabs(m.mean - 2.0) < 3.0 * m.se);
    CHECK(std::fabs(var.mean - 1.0) < 3.0 * var.se);
  }

  TEST_CASE("release variance scaling in the rate") {
    // M = 2 separates dσ²/(μM-1)³ from dM²σ²/(μM-1)³
    const IGParams p(1.0, 1.0);
    const auto mv = mean_var_w_tau_star(p, 2.0, 1.0, 0.0);
    CHECK(mv.mean.value() == doctest::Approx(1.0));
    RngStream rng(15, 0);
    std::vector<double> v(200000);
    for (double& x : v) x = simulate_release(p, 2.0, 1.0, rng);
    const auto var = oracle::variance_se(v);
    CHECK(std::fabs(var.mean - mv.variance.value()) < 3.0 * var.se);
    CHECK(std::fabs(var.mean - 4.0) > 10.0 * var.se);
  }

  TEST_CASE("derivative of the release transform is the mean") {
    const IGParams p(2.0, 1.0);
    for (double M : {0.8, 1.0, 3.0}) {
      auto slope = [&](double h) { return (1.0 - lt_w_tau_star(p, M, 1.5, 0.0, h)) / h; };
      const double rich = 2.0 * slope(1e-4) - slope(2e-4);
      CHECK(rich == doctest::Approx(mean_var_w_tau_star(p, M, 1.5, 0.0).mean.value()).epsilon(1e-3));
    }
  }
}
