#pragma once
// Closed-form quantities: the instantaneous rebalancing-shortfall rate under
// bounded liquidity on the hedge venue, its constant-product specialization,
// the value-normalized rate, path integrals of these rates, and the expected
// total used as the Monte-Carlo oracle.
//
// With s = |x'(Q)| the pool's marginal depth and s~ = |x~'(Q)| the hedge
// venue's, the adjusted instantaneous rate is
//
//   ell(sigma, Q) = (sigma^2 Q^2 / 2) * (1 - s/s~) * s
//
// For two constant-product venues with depth ratio r = s~/s this becomes
// (sigma^2 Q^2 / 2) * (1 - 1/r) * s, and dividing by pool value gives the
// Q-independent rate sigma^2/8 * (1 - 1/r). When r < 1 the hedge venue is
// the shallower one and the rate goes negative; it is reported as-is.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "lvrlab/curves.hpp"
#include "lvrlab/numeric.hpp"
#include "lvrlab/price_dynamics.hpp"

namespace lvrlab {

struct LvrParams {
  double sigma = 0.0;
  double illiquid_slope = 0.0;  // |x'(Q)| of the pool, > 0
  double liquid_slope = 0.0;    // |x~'(Q)| of the hedge venue; +inf = frictionless
  double price = 0.0;           // Q
};

// Depth of the hedge venue relative to the pool, r = |x~'| / |x'|.
class RelativeLiquidity {
 public:
  explicit RelativeLiquidity(double r) : r_(r) {
    if (std::isnan(r_) || r_ <= 0.0) {
      throw std::invalid_argument("RelativeLiquidity: ratio must be positive, got " + std::to_string(r_));
    }
  }

  double ratio() const { return r_; }

  // The closed-form results are stated for r >= 1; below that the rate is
  // negative and callers should treat it as out-of-regime.
  bool within_stated_regime() const { return r_ >= 1.0; }

 private:
  double r_;
};

inline double ell(const LvrParams& p) {
  const double friction = 1.0 - p.illiquid_slope / p.liquid_slope;  // 1 when liquid_slope = inf
  return 0.5 * p.sigma * p.sigma * p.price * p.price * friction * p.illiquid_slope;
}

inline double ell_cpmm(double sigma, double q, double invariant_root, double r) {
  const double slope = 0.5 * invariant_root / (q * std::sqrt(q));
  return 0.5 * sigma * sigma * q * q * (1.0 - 1.0 / r) * slope;
}

// Rate per unit of pool value; independent of Q and of the pool size.
inline double normalized_lvr(double sigma, double r) {
  return sigma * sigma / 8.0 * (1.0 - 1.0 / r);
}

// The quadratic-cost drain rate alone: (sigma^2 Q^2 / 2) * s^2 / s~.
inline double cost_rate(const LvrParams& p) {
  return 0.5 * p.sigma * p.sigma * p.price * p.price * p.illiquid_slope * p.illiquid_slope /
         p.liquid_slope;
}

// Left-endpoint Riemann sum of ell along a sampled path.
template <liquidity_curve CI, marginal_liquidity L>
double integrate_ell(const PricePath& path, const CI& illiquid, const L& liquid, double sigma) {
  NeumaierSum sum;
  for (std::size_t i = 1; i < path.price.size(); ++i) {
    const double q = path.price[i - 1];
    const double dt = path.time[i] - path.time[i - 1];
    const LvrParams p{sigma, std::abs(illiquid.slope(q)), liquid.slope_magnitude(q), q};
    sum.add(ell(p) * dt);
  }
  return sum.value();
}

// Left-endpoint Riemann sum of the cost drain rate along a sampled path; the
// continuous-time counterpart of the realized quadratic-variation cost.
template <liquidity_curve CI, marginal_liquidity L>
double integrate_cost_rate(const PricePath& path, const CI& illiquid, const L& liquid, double sigma) {
  NeumaierSum sum;
  for (std::size_t i = 1; i < path.price.size(); ++i) {
    const double q = path.price[i - 1];
    const double dt = path.time[i] - path.time[i - 1];
    const LvrParams p{sigma, std::abs(illiquid.slope(q)), liquid.slope_magnitude(q), q};
    sum.add(cost_rate(p) * dt);
  }
  return sum.value();
}

// Expected total shortfall over [0, T] for two constant-product venues.
// Derivation: ell = sigma^2/8 * (1 - 1/r) * V(Q_t), the value of the pool is
// V(Q) = 2K sqrt(Q), and for the zero-drift lognormal E[sqrt(Q_t)] =
// sqrt(q0) * exp(-sigma^2 t / 8); integrating in t gives
//
//   E[total] = 2K sqrt(q0) * (1 - 1/r) * (1 - exp(-sigma^2 T / 8)).
inline double expected_lvr_cpmm(double sigma, double horizon, double q0, double invariant_root,
                                double r) {
  const double decay = -std::expm1(-sigma * sigma * horizon / 8.0);
  return 2.0 * invariant_root * std::sqrt(q0) * (1.0 - 1.0 / r) * decay;
}

struct VariationStats {
  double quadratic_cost = 0.0;  // sum of dx^2 / (2 |x~'(q_prev)|)
  double absolute = 0.0;        // sum of |dx|
};

// Works over any range of step records exposing .dx and .q_prev.
template <class RecordRange, marginal_liquidity L>
VariationStats variation_stats(const RecordRange& records, const L& liquid) {
  NeumaierSum quad, abs_sum;
  for (const auto& rec : records) {
    quad.add(rec.dx * rec.dx / (2.0 * liquid.slope_magnitude(rec.q_prev)));
    abs_sum.add(std::abs(rec.dx));
  }
  return {quad.value(), abs_sum.value()};
}

}  // namespace lvrlab
