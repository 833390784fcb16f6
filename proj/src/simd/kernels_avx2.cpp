// AVX2 + FMA variants of the batch kernels. Compiled with -mavx2 -mfma and
// only reached through the dispatch table after a CPU feature check.

#include <immintrin.h>

#include <array>
#include <cmath>
#include <cstddef>

#include "dam/simd/kernels.hpp"

namespace dam::simd {
namespace {

using V = __m256d;

inline V set1(double x) { return _mm256_set1_pd(x); }
inline V blend(V a, V b, V mask) { return _mm256_blendv_pd(a, b, mask); }
inline V vabs(V x) { return _mm256_andnot_pd(set1(-0.0), x); }
inline V lt(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_LT_OQ); }
inline V gt(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
inline V ge(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_GE_OQ); }

inline V pow2i(__m128i k) {
  __m256i k64 = _mm256_cvtepi32_epi64(k);
  k64 = _mm256_add_epi64(k64, _mm256_set1_epi64x(1023));
  return _mm256_castsi256_pd(_mm256_slli_epi64(k64, 52));
}

// exp with round-to-nearest range reduction and a degree-13 Taylor
// polynomial on |r| <= ln2/2; 2^n is applied in two halves so results
// down to the subnormal range are produced.
inline V vexp(V x) {
  const V hi = set1(709.78);
  const V lo = set1(-745.2);
  const V over = gt(x, hi);
  const V under = lt(x, lo);
  const V nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  const V xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);
  const V n = _mm256_round_pd(_mm256_mul_pd(xc, set1(1.4426950408889634074)),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  V r = _mm256_fnmadd_pd(n, set1(0.693145751953125), xc);
  r = _mm256_fnmadd_pd(n, set1(1.42860682030941723212e-6), r);

  V p = set1(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, set1(0.5));
  p = _mm256_fmadd_pd(p, r, set1(1.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0));

  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m128i n1 = _mm_srai_epi32(ni, 1);
  const __m128i n2 = _mm_sub_epi32(ni, n1);
  V res = _mm256_mul_pd(_mm256_mul_pd(p, pow2i(n1)), pow2i(n2));
  res = blend(res, set1(HUGE_VAL), over);
  res = blend(res, _mm256_setzero_pd(), under);
  return blend(res, x, nan);
}

// e^{-x^2} with the product error of x*x folded back in.
inline V vexp_neg_square(V x) {
  const V p = _mm256_mul_pd(x, x);
  const V err = _mm256_fmsub_pd(x, x, p);
  const V e = _mm256_mul_pd(vexp(_mm256_sub_pd(_mm256_setzero_pd(), p)),
                            _mm256_sub_pd(set1(1.0), err));
  return blend(e, _mm256_setzero_pd(), gt(p, set1(745.5)));
}

// Chebyshev expansion of (x + 2) erfcx(x) in t = (x - 2)/(x + 2), x >= 0.
constexpr std::array<double, 28> kErfcxCheb = {
    1.1540674772329393,     -0.710873842540997,     0.13019031765757305,
    -0.007342284791673278,  -0.002225689486705265,  0.0003215165983075616,
    6.556063148346275e-05,  -1.0884883291010032e-05, -3.0309331106342965e-06,
    2.859521636233973e-07,  1.6469217654838986e-07, 2.5925693704613126e-09,
    -8.309443262030397e-09, -1.2694116556725622e-09, 2.864164542451245e-10,
    1.232078021040917e-10,  4.1224277109443396e-12, -7.1429862976954085e-12,
    -1.7172845686503592e-12, 1.2291200427581278e-13, 1.4837451497193274e-13,
    2.5790085510064717e-14, -4.717452771424786e-15, -3.1458698763509172e-15,
    -4.55659324808812e-16,  1.262466090796389e-16,  7.18335274752594e-17,
    1.009961919631128e-17};

inline V verfcx_pos(V x) {
  const V big = gt(x, set1(1e8));
  const V xs = _mm256_min_pd(x, set1(1e8));
  const V den = _mm256_add_pd(xs, set1(2.0));
  const V t = _mm256_div_pd(_mm256_sub_pd(xs, set1(2.0)), den);
  const V t2 = _mm256_add_pd(t, t);
  V b1 = _mm256_setzero_pd();
  V b2 = _mm256_setzero_pd();
  for (std::size_t i = kErfcxCheb.size() - 1; i >= 1; --i) {
    const V tmp = _mm256_add_pd(_mm256_fmsub_pd(t2, b1, b2), set1(kErfcxCheb[i]));
    b2 = b1;
    b1 = tmp;
  }
  const V sum = _mm256_add_pd(_mm256_fmsub_pd(t, b1, b2), set1(kErfcxCheb[0]));
  const V asym = _mm256_div_pd(set1(0.56418958354775628695), x);  // 1/(x√π)
  return blend(_mm256_div_pd(sum, den), asym, big);
}

inline V verfc(V x) {
  const V ax = vabs(x);
  const V y = _mm256_mul_pd(vexp_neg_square(ax), verfcx_pos(ax));
  const V yy = blend(y, _mm256_setzero_pd(), gt(ax, set1(27.5)));
  return blend(yy, _mm256_sub_pd(set1(2.0), yy), lt(x, _mm256_setzero_pd()));
}

inline V verfcx(V x) {
  const V neg = lt(x, _mm256_setzero_pd());
  const V ax = vabs(x);
  const V pos = verfcx_pos(ax);
  const V p = _mm256_mul_pd(ax, ax);
  const V err = _mm256_fmsub_pd(ax, ax, p);
  const V e2 = _mm256_mul_pd(vexp(p), _mm256_add_pd(set1(1.0), err));
  const V negv = _mm256_fmsub_pd(set1(2.0), e2, pos);
  return blend(pos, negv, neg);
}

// Runs `op` over n elements in blocks of four; the ragged tail is padded
// with `pad` so every lane sees valid input.
template <std::size_t NIn, std::size_t NOut, class Op>
void run(std::size_t n, const std::array<const double*, NIn>& in,
         const std::array<double*, NOut>& out, double pad, Op op) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    std::array<V, NIn> v;
    for (std::size_t k = 0; k < NIn; ++k) v[k] = _mm256_loadu_pd(in[k] + i);
    const std::array<V, NOut> r = op(v);
    for (std::size_t k = 0; k < NOut; ++k) _mm256_storeu_pd(out[k] + i, r[k]);
  }
  if (i < n) {
    const std::size_t rem = n - i;
    alignas(32) double buf[NIn][4];
    alignas(32) double obuf[NOut][4];
    std::array<V, NIn> v;
    for (std::size_t k = 0; k < NIn; ++k) {
      for (std::size_t j = 0; j < 4; ++j) buf[k][j] = j < rem ? in[k][i + j] : pad;
      v[k] = _mm256_load_pd(buf[k]);
    }
    const std::array<V, NOut> r = op(v);
    for (std::size_t k = 0; k < NOut; ++k) {
      _mm256_store_pd(obuf[k], r[k]);
      for (std::size_t j = 0; j < rem; ++j) out[k][i + j] = obuf[k][j];
    }
  }
}

void exp_avx2(const double* x, double* out, std::size_t n) {
  run<1, 1>(n, {x}, {out}, 0.0, [](const std::array<V, 1>& v) { return std::array<V, 1>{vexp(v[0])}; });
}

void erfc_avx2(const double* x, double* out, std::size_t n) {
  run<1, 1>(n, {x}, {out}, 0.0, [](const std::array<V, 1>& v) { return std::array<V, 1>{verfc(v[0])}; });
}

void erfcx_avx2(const double* x, double* out, std::size_t n) {
  run<1, 1>(n, {x}, {out}, 0.0, [](const std::array<V, 1>& v) { return std::array<V, 1>{verfcx(v[0])}; });
}

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
constexpr double kInvSqrt2 = 0.707106781186547524400844362104849039;
constexpr double kInvSqrtPi = 0.564189583547756286948079451560772586;

void ig_density_avx2(double mu, double sigma2, const double* t, const double* z, double* out,
                     std::size_t n) {
  const V vmu = set1(mu);
  const V inv2s2 = set1(1.0 / (2.0 * sigma2));
  const V pref = set1(kInvSqrt2Pi / std::sqrt(sigma2));
  run<2, 1>(n, {t, z}, {out}, 1.0, [&](const std::array<V, 2>& v) {
    const V tt = v[0];
    const V zz = v[1];
    const V pos = gt(zz, _mm256_setzero_pd());
    const V d = _mm256_fmsub_pd(vmu, zz, tt);
    const V q = _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(d, d), inv2s2), zz);
    const V zs = _mm256_mul_pd(zz, _mm256_sqrt_pd(zz));
    V r = _mm256_mul_pd(_mm256_div_pd(_mm256_mul_pd(tt, pref), zs),
                        vexp(_mm256_sub_pd(_mm256_setzero_pd(), q)));
    r = blend(r, _mm256_setzero_pd(), gt(q, set1(745.0)));
    return std::array<V, 1>{_mm256_and_pd(r, pos)};
  });
}

void ig_cdf_parts_avx2(double mu, double sigma2, const double* t, const double* z, double* lower,
                       double* upper, double* reflected, std::size_t n) {
  const V vmu = set1(mu);
  const V vs2 = set1(sigma2);
  run<2, 3>(n, {t, z}, {lower, upper, reflected}, 1.0, [&](const std::array<V, 2>& v) {
    const V tt = v[0];
    const V zz = v[1];
    const V pos = gt(zz, _mm256_setzero_pd());
    const V sz = _mm256_sqrt_pd(_mm256_mul_pd(vs2, zz));
    const V a = _mm256_div_pd(_mm256_fmsub_pd(vmu, zz, tt), sz);
    const V b = _mm256_div_pd(_mm256_fmadd_pd(vmu, zz, tt), sz);
    const V tail = _mm256_mul_pd(set1(0.5), verfc(_mm256_mul_pd(vabs(a), set1(kInvSqrt2))));
    const V refl = _mm256_mul_pd(
        _mm256_mul_pd(set1(0.5), vexp_neg_square(_mm256_mul_pd(a, set1(kInvSqrt2)))),
        verfcx_pos(_mm256_mul_pd(b, set1(kInvSqrt2))));
    const V comp = _mm256_sub_pd(set1(1.0), tail);
    const V apos = ge(a, _mm256_setzero_pd());
    const V lo = blend(tail, comp, apos);
    const V up = blend(comp, tail, apos);
    return std::array<V, 3>{_mm256_and_pd(lo, pos), blend(set1(1.0), up, pos),
                            _mm256_and_pd(refl, pos)};
  });
}

struct Terms {
  double sigma, a2, c, k, A;
};

Terms terms(double mu, double sigma2, double alpha) {
  const double sigma = std::sqrt(sigma2);
  return {sigma, mu * mu / (2.0 * sigma2), 0.5 * (mu - alpha * sigma2),
          (alpha * sigma2 - mu) / sigma * kInvSqrt2, alpha * (0.5 * alpha * sigma2 - mu)};
}

// e^{Ay} erfc(k√y) without overflow; the sign of k fixes the branch.
inline V scaled_tail(const Terms& r, V sy, V y, V base) {
  const V e = verfcx_pos(vabs(_mm256_mul_pd(set1(r.k), sy)));
  if (r.k >= 0.0) return _mm256_mul_pd(base, e);
  const V grow = vexp(_mm256_mul_pd(set1(r.A), y));
  return _mm256_fmsub_pd(set1(2.0), grow, _mm256_mul_pd(base, e));
}

void resolvent_density_avx2(double mu, double sigma2, double alpha, const double* y, double* out,
                            std::size_t n) {
  const Terms r = terms(mu, sigma2, alpha);
  run<1, 1>(n, {y}, {out}, 1.0, [&](const std::array<V, 1>& v) {
    const V yy = v[0];
    const V pos = gt(yy, _mm256_setzero_pd());
    const V sy = _mm256_sqrt_pd(yy);
    const V base = vexp(_mm256_mul_pd(set1(-r.a2), yy));
    const V first = _mm256_div_pd(_mm256_mul_pd(set1(r.sigma * kInvSqrt2Pi), base), sy);
    const V res = _mm256_fmadd_pd(set1(r.c), scaled_tail(r, sy, yy, base), first);
    return std::array<V, 1>{_mm256_and_pd(res, pos)};
  });
}

void resolvent_derivative_avx2(double mu, double sigma2, double alpha, const double* y,
                               double* out, std::size_t n) {
  const Terms r = terms(mu, sigma2, alpha);
  run<1, 1>(n, {y}, {out}, 1.0, [&](const std::array<V, 1>& v) {
    const V yy = v[0];
    const V pos = gt(yy, _mm256_setzero_pd());
    const V sy = _mm256_sqrt_pd(yy);
    const V base = vexp(_mm256_mul_pd(set1(-r.a2), yy));
    const V inv_sy = _mm256_div_pd(set1(1.0), sy);
    // -σ/√(2π) (1/(2y^{3/2}) + a2/√y) - c k/(√π √y)
    const V inner = _mm256_fmadd_pd(set1(0.5), _mm256_div_pd(inv_sy, yy), _mm256_mul_pd(set1(r.a2), inv_sy));
    const V singular = _mm256_fmadd_pd(set1(-r.sigma * kInvSqrt2Pi), inner,
                                       _mm256_mul_pd(set1(-r.c * r.k * kInvSqrtPi), inv_sy));
    const V res = _mm256_fmadd_pd(base, singular,
                                  _mm256_mul_pd(set1(r.c * r.A), scaled_tail(r, sy, yy, base)));
    return std::array<V, 1>{_mm256_and_pd(res, pos)};
  });
}

void ig_transform_avx2(double mean, double shape, const double* normal, const double* uniform,
                       double* out, std::size_t n) {
  const V m = set1(mean);
  const V scale = set1(mean / (2.0 * shape));
  const V m2 = set1(mean * mean);
  run<2, 1>(n, {normal, uniform}, {out}, 0.5, [&](const std::array<V, 2>& v) {
    const V y = _mm256_mul_pd(v[0], v[0]);
    const V q = _mm256_mul_pd(scale, y);
    const V root = _mm256_sqrt_pd(_mm256_mul_pd(q, _mm256_add_pd(set1(2.0), q)));
    const V x1 = _mm256_div_pd(m, _mm256_add_pd(_mm256_add_pd(set1(1.0), q), root));
    const V keep = _mm256_cmp_pd(_mm256_mul_pd(v[1], _mm256_add_pd(m, x1)), m, _CMP_LE_OQ);
    return std::array<V, 1>{blend(_mm256_div_pd(m2, x1), x1, keep)};
  });
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{Isa::avx2,
                                 "avx2",
                                 exp_avx2,
                                 erfc_avx2,
                                 erfcx_avx2,
                                 ig_density_avx2,
                                 ig_cdf_parts_avx2,
                                 resolvent_density_avx2,
                                 resolvent_derivative_avx2,
                                 ig_transform_avx2};
  return table;
}

}  // namespace dam::simd
