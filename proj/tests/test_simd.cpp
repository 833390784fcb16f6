#include <cmath>
#include <random>
#include <vector>

#include "dam/simd/kernels.hpp"
#include "doctest.h"

using namespace dam::simd;

namespace {

bool close(double a, double b, double rel, double abs_floor = 0.0) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= std::max(rel * std::max(std::fabs(a), std::fabs(b)), abs_floor);
}

// exp(-q) carries the rounding of q times |q|, so tiny values get a
// relative allowance that grows with their log
bool close_exp(double a, double b, double rel) {
  const double m = std::max(std::fabs(a), std::fabs(b));
  const double q = m > 0.0 ? std::fabs(std::log(m)) : 0.0;
  return close(a, b, rel + 2e-15 * q, 1e-300);
}

std::vector<double> uniform(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 e(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(e);
  return v;
}

// odd lengths exercise the remainder path
constexpr std::size_t kN = 1003;

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("tables and selection") {
    CHECK(scalar_table().isa == Isa::scalar);
    const KernelTable& before = active();
    select(Isa::scalar);
    CHECK(active().isa == Isa::scalar);
    if (avx2_table() != nullptr) {
      select(Isa::avx2);
      CHECK(active().isa == Isa::avx2);
    } else {
      CHECK_THROWS(select(Isa::avx2));
    }
    select(before.isa);
  }

  TEST_CASE("avx2 kernels match the scalar reference") {
    const KernelTable* v = avx2_table();
    if (v == nullptr) {
      MESSAGE("AVX2 not available; equivalence not exercised");
      return;
    }
    const KernelTable& s = scalar_table();
    std::vector<double> a(kN), b(kN), c(kN), d(kN), e(kN), f(kN);

    SUBCASE("exp") {
      auto x = uniform(kN, -740.0, 705.0, 1);
      x[0] = -800.0;
      x[1] = 800.0;
      x[2] = 0.0;
      x[3] = NAN;
      s.exp(x.data(), a.data(), kN);
      v->exp(x.data(), b.data(), kN);
      for (std::size_t i = 0; i < kN; ++i) {
        CAPTURE(x[i]);
        CHECK(close(a[i], b[i], 4e-16, 1e-300));
      }
    }
    SUBCASE("erfc and erfcx") {
      auto x = uniform(kN, -26.0, 40.0, 2);
      s.erfc(x.data(), a.data(), kN);
      v->erfc(x.data(), b.data(), kN);
      s.erfc_scaled(x.data(), c.data(), kN);
      v->erfc_scaled(x.data(), d.data(), kN);
      for (std::size_t i = 0; i < kN; ++i) {
        CAPTURE(x[i]);
        CHECK(close(a[i], b[i], 1e-13, 1e-300));
        CHECK(close(c[i], d[i], 1e-13));
      }
    }
    SUBCASE("ig density and distribution parts") {
      auto t = uniform(kN, 1e-4, 20.0, 3);
      auto z = uniform(kN, -1.0, 30.0, 4);
      for (double mu : {0.5, 2.0})
        for (double s2 : {0.25, 3.0}) {
          s.ig_density(mu, s2, t.data(), z.data(), a.data(), kN);
          v->ig_density(mu, s2, t.data(), z.data(), b.data(), kN);
          s.ig_cdf_parts(mu, s2, t.data(), z.data(), c.data(), d.data(), e.data(), kN);
          std::vector<double> c2(kN), d2(kN), e2(kN);
          v->ig_cdf_parts(mu, s2, t.data(), z.data(), c2.data(), d2.data(), e2.data(), kN);
          for (std::size_t i = 0; i < kN; ++i) {
            CAPTURE(t[i]);
            CAPTURE(z[i]);
            CHECK(close_exp(a[i], b[i], 1e-13));
            CHECK(close_exp(c[i], c2[i], 1e-13));
            CHECK(close_exp(d[i], d2[i], 1e-13));
            CHECK(close_exp(e[i], e2[i], 1e-13));
          }
        }
    }
    SUBCASE("resolvent density and derivative") {
      auto y = uniform(kN, 1e-6, 60.0, 5);
      y[0] = 0.0;
      y[1] = -1.0;
      for (double alpha : {0.0, 0.3, 1.0, 2.0, 7.5}) {
        s.resolvent_density(1.0, 1.0, alpha, y.data(), a.data(), kN);
        v->resolvent_density(1.0, 1.0, alpha, y.data(), b.data(), kN);
        s.resolvent_derivative(2.0, 0.5, alpha, y.data(), c.data(), kN);
        v->resolvent_derivative(2.0, 0.5, alpha, y.data(), d.data(), kN);
        for (std::size_t i = 0; i < kN; ++i) {
          CAPTURE(alpha);
          CAPTURE(y[i]);
          // both terms can cancel; compare on the scale of the larger term
          CHECK(close(a[i], b[i], 1e-12, 1e-13 * (1.0 + 1.0 / std::sqrt(std::max(y[i], 1e-6))) *
                                             std::exp(-0.5 * std::max(y[i], 0.0))));
          CHECK(close(c[i], d[i], 1e-12, 1e-13 * (1.0 + std::pow(std::max(y[i], 1e-6), -1.5)) *
                                             std::exp(-4.0 * std::max(y[i], 0.0))));
        }
      }
    }
    SUBCASE("inverse Gaussian transform") {
      std::mt19937_64 eng(6);
      std::normal_distribution<double> nd;
      auto u = uniform(kN, 1e-12, 1.0, 7);
      for (double& n : f) n = nd(eng);
      s.ig_transform(1.7, 0.4, f.data(), u.data(), a.data(), kN);
      v->ig_transform(1.7, 0.4, f.data(), u.data(), b.data(), kN);
      for (std::size_t i = 0; i < kN; ++i) CHECK(close(a[i], b[i], 1e-14));
    }
  }
}
