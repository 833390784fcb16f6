#pragma once

// Batch kernels for the data-parallel inner loops: quadrature nodes,
// Monte Carlo transforms and distribution evaluations. A scalar reference
// table is always present; an AVX2+FMA table is compiled when the toolchain
// supports it and selected at runtime when the CPU does. Setting the
// environment variable DAM_SIMD=scalar forces the reference table.

#include <cstddef>
#include <span>

namespace dam::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  void (*exp)(const double* x, double* out, std::size_t n);
  void (*erfc)(const double* x, double* out, std::size_t n);
  void (*erfc_scaled)(const double* x, double* out, std::size_t n);

  // Inverse Gaussian increment law of I_t, elementwise over (t[i], z[i]).
  void (*ig_density)(double mu, double sigma2, const double* t, const double* z, double* out,
                     std::size_t n);
  // Distribution-function parts at (t, z) with a = (μz - t)/(σ√z),
  // b = (μz + t)/(σ√z), q = a²/2:
  //   lower = Φ(a), upper = Φ(-a), reflected = e^{2tμ/σ²} Φ(-b).
  // cdf = lower + reflected, sf = upper - reflected,
  // E[I; I<=z] = (t/μ)(lower - reflected), E[I; I>z] = (t/μ)(upper + reflected).
  void (*ig_cdf_parts)(double mu, double sigma2, const double* t, const double* z, double* lower,
                       double* upper, double* reflected, std::size_t n);

  // Resolvent density u_α(y) of the input process and its derivative in y.
  void (*resolvent_density)(double mu, double sigma2, double alpha, const double* y, double* out,
                            std::size_t n);
  void (*resolvent_derivative)(double mu, double sigma2, double alpha, const double* y,
                               double* out, std::size_t n);

  // Michael–Schucany–Haas transform: IG(mean, shape) draws from standard
  // normals and uniforms on (0,1).
  void (*ig_transform)(double mean, double shape, const double* normal, const double* uniform,
                       double* out, std::size_t n);
};

const KernelTable& scalar_table();
/// AVX2 table, or nullptr when not compiled in or unsupported by the CPU.
const KernelTable* avx2_table();

/// The table used by the library.
const KernelTable& active();
/// Overrides the active table; throws if the requested ISA is unavailable.
void select(Isa isa);

// Span front-ends over the active table.

inline void exp(std::span<const double> x, std::span<double> out) {
  active().exp(x.data(), out.data(), x.size());
}

inline void ig_density(double mu, double sigma2, std::span<const double> t,
                       std::span<const double> z, std::span<double> out) {
  active().ig_density(mu, sigma2, t.data(), z.data(), out.data(), out.size());
}

inline void resolvent_density(double mu, double sigma2, double alpha, std::span<const double> y,
                              std::span<double> out) {
  active().resolvent_density(mu, sigma2, alpha, y.data(), out.data(), out.size());
}

inline void resolvent_derivative(double mu, double sigma2, double alpha,
                                 std::span<const double> y, std::span<double> out) {
  active().resolvent_derivative(mu, sigma2, alpha, y.data(), out.data(), out.size());
}

}  // namespace dam::simd
