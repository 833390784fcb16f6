#pragma once

// Law of the up-crossing pair (W, I_W) of a level L > 0 by the input
// process started at 0: W = W_L, I_W ∈ (L, ∞) is the landing level.
// A start x below a threshold λ is the level shift L = λ - x.

#include <functional>
#include <span>
#include <vector>

#include "dam/ig.hpp"
#include "dam/quadrature.hpp"
#include "dam/resolvents.hpp"

namespace dam {

/// Which coefficient multiplies u₀(s - L) in the joint density: the
/// transition density p(t, L), or the constant u₀(L) used by the marginal.
enum class JointReading { transition_density, resolvent_constant };

/// Route used for the α-discounted landing kernel.
enum class LandingRoute {
  levy,           // ∫_0^L u_α(y) ν(s - y) dy
  factorization,  // inversion of (α + ψ(β)) L_β(u_α 1{>L})
};

class OvershootLaw {
 public:
  OvershootLaw(IGParams params, double level, QuadConfig cfg = {});

  const IGParams& params() const { return params_; }
  double level() const { return level_; }
  const QuadConfig& config() const { return cfg_; }

  /// Marginal density of I_W at s > L by inversion of the joint transform.
  double pdf(double s) const;
  /// Same density from the jump compensation formula.
  double pdf_levy(double s) const;
  /// P(I_W > s).
  double sf(double s) const;
  double cdf(double s) const { return 1.0 - sf(s); }
  /// E I_W = E W / μ.
  double mean() const;

  /// m_α(s) with E[e^{-αW} h(I_W)] = ∫_L^∞ h(s) m_α(s) ds.
  double landing_kernel(double alpha, double s, LandingRoute route = LandingRoute::levy) const;

  /// Joint density of (W, I_W) at t > 0, s > L.
  double joint_density(double t, double s,
                       JointReading reading = JointReading::transition_density) const;
  /// E e^{-αW - βI_W} = (α + ψ(β)) ∫_L^∞ e^{-βz} u_α(z) dz.
  double joint_transform(double alpha, double beta) const;

  /// ∫_L^∞ h(s) m_α(s) ds. `breaks` are points > L where h is not smooth.
  double expect(const std::function<double(double)>& h, double alpha,
                std::span<const double> breaks = {},
                LandingRoute route = LandingRoute::levy) const;
  /// Batch version: h receives all outer nodes of a panel.
  double expect_batch(const quad::BatchIntegrand& h, double alpha, std::span<const double> breaks,
                      LandingRoute route = LandingRoute::levy) const;

  /// Tail length scale of the landing law.
  double tail_scale() const;

 private:
  double factorization(double alpha, double s) const;
  double levy(double alpha, double s) const;

  IGParams params_;
  double level_;
  QuadConfig cfg_;
};

/// Tail of the Lévy measure, ν((r, ∞)).
double levy_tail(const IGParams& p, double r);

}  // namespace dam
