#include <cmath>
#include <initializer_list>

#include "dam/special.hpp"
#include "doctest.h"

using namespace dam::special;

TEST_SUITE("special") {
  TEST_CASE("erf and erfc identities") {
    CHECK(dam::special::erfc(0.0) == 1.0);
    for (double x : {-5.0, -1.0, 0.0, 1.0, 5.0}) {
      CHECK(dam::special::erf(x) + dam::special::erfc(x) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(dam::special::erfc(-x) == doctest::Approx(2.0 - dam::special::erfc(x)).epsilon(1e-15));
    }
  }

  TEST_CASE("erfc_scaled against extended-precision values") {
    // 40-digit evaluations of exp(x^2) erfc(x)
    const struct {
      double x, v;
    } table[] = {
        {-26.0, 7.657724931490568351527e+293}, {-20.0, 1.044293937952828790118e+174},
        {-10.0, 5.376234283632270896825e+43},  {-3.5, 417962.4224457703141291},
        {-1.0, 5.00898008076228346631},        {-0.25, 1.35864237010472211521},
        {0.0, 1.0},                            {0.25, 0.7703465477309967439167},
        {0.5, 0.6156903441929258748707934},    {1.0, 0.4275835761558070044108},
        {2.5, 0.2108063640611435806471},       {3.0, 0.1790011511813899504192948},
        {5.0, 0.1107046377330686263702},       {9.9, 0.05670245693883227025553},
        {10.0, 0.05614099274382258585751739},  {15.0, 0.03752960638850576574606},
        {26.5, 0.02127504668537110595521},     {29.99, 0.01880214929886935905458},
    };
    for (const auto& e : table) {
      CAPTURE(e.x);
      CHECK(std::fabs(erfc_scaled(e.x) - e.v) <= 1e-12 * e.v);
    }
  }

  TEST_CASE("erfc_scaled is not representable far left") {
    CHECK(std::isinf(erfc_scaled(-27.0)));
    CHECK(erfc_scaled(INFINITY) == 0.0);
    CHECK(std::isnan(erfc_scaled(NAN)));
  }

  TEST_CASE("normal helpers") {
    CHECK(normal_pdf(0.0) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-16));
    CHECK(normal_cdf(0.0) == 0.5);
    // lower tail keeps relative accuracy
    CHECK(normal_cdf(-30.0) == doctest::Approx(4.906713927148187e-198).epsilon(1e-12));
    CHECK(exp_neg_square(3.0) == doctest::Approx(std::exp(-9.0)).epsilon(1e-15));
  }
}
