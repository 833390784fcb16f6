#pragma once

// Special functions shared by every module: the standard normal density and
// distribution, erf/erfc, and the scaled complementary error function
// erfcx(x) = exp(x^2) erfc(x).

namespace dam::special {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
inline constexpr double kSqrtPi = 1.772453850905516027298167483341145183;
inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;

double normal_pdf(double x);
/// Φ(x), accurate in the lower tail.
double normal_cdf(double x);
double erf(double x);
double erfc(double x);

/// erfcx(x) = e^{x^2} erfc(x). Relative error below 1e-15 for x >= 0.
/// For x < 0 the value is 2e^{x^2} - erfcx(-x) and overflows to +inf once
/// e^{x^2} is not representable (x < -26.6).
double erfc_scaled(double x);

/// e^{-x^2} with the rounding error of x*x compensated.
double exp_neg_square(double x);

}  // namespace dam::special
