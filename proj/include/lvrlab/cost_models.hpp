#pragma once
// Trading-cost models for the liquid venue.
//
// The workhorse is the quadratic model: integrating a linear price impact
// with marginal depth s = |x'(Q)| gives cost(dx) = dx^2 / (2s). For a
// constant-product venue the exact slippage is also available, which lets
// tests pin the approximation error in closed form. The piecewise model
// (constant marginal cost up to a threshold, then linear) captures books
// whose depth is concentrated at the touch.

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <utility>

#include "lvrlab/curves.hpp"
#include "lvrlab/errors.hpp"

namespace lvrlab {

template <class M>
concept cost_model = requires(const M& m, double q, double dx) {
  { m.cost(q, dx) } -> std::convertible_to<double>;
};

// cost(Q, dx) = dx^2 / (2 |x'(Q)|), slope taken at the pre-trade price.
// Even in dx, zero at dx = 0. An infinite slope source yields zero cost
// (the frictionless benchmark); a non-positive slope is an error.
template <marginal_liquidity S>
class QuadraticCost {
 public:
  explicit QuadraticCost(S source) : source_(std::move(source)) {}

  double cost(double q, double dx) const {
    const double s = source_.slope_magnitude(q);
    if (std::isnan(s) || s <= 0.0) {
      throw DegenerateLiquidityError("quadratic cost: marginal liquidity must be positive, got " +
                                     std::to_string(s) + " at price " + std::to_string(q));
    }
    return dx * dx / (2.0 * s);
  }

  double slope_magnitude(double q) const { return source_.slope_magnitude(q); }

 private:
  S source_;
};

// Exact slippage of trading dx risky units against a constant-product pool
// whose marginal price is q: cost = q*dx - dy = q*dx^2 / (x + dx).
inline double cpmm_exact_cost(const CpmmCurve& liquid, double q, double dx) {
  const double x = liquid.reserves_risky(q);
  if (x + dx <= 0.0) {
    throw ReserveExhaustionError("cpmm_exact_cost: trade of " + std::to_string(dx) +
                                 " exhausts risky reserves " + std::to_string(x));
  }
  return q * dx * dx / (x + dx);
}

// Small-trade approximation of the above, written directly as q*dx^2/x.
// Equals the quadratic model with slope |x'(Q)| = x(Q)/(2Q); both forms are
// kept so tests can assert the algebra.
inline double cpmm_quadratic_cost(const CpmmCurve& liquid, double q, double dx) {
  return q * dx * dx / liquid.reserves_risky(q);
}

// Marginal cost c for trades up to alpha, then growing linearly with slope
// 1/slope_magnitude. C' is continuous at the knee; total cost is the exact
// integral of C'. Directions are charged symmetrically via |dx|.
class PiecewiseMarginalCost {
 public:
  PiecewiseMarginalCost(double c, double alpha, double slope_magnitude)
      : c_(c), alpha_(alpha), s_(slope_magnitude) {
    if (!(std::isfinite(c_) && c_ > 0.0)) {
      throw std::invalid_argument("PiecewiseMarginalCost: c must be positive");
    }
    if (!(std::isfinite(alpha_) && alpha_ > 0.0)) {
      throw std::invalid_argument("PiecewiseMarginalCost: alpha must be positive");
    }
    if (!(std::isfinite(s_) && s_ > 0.0)) {
      throw std::invalid_argument("PiecewiseMarginalCost: slope magnitude must be positive");
    }
  }

  double constant_part() const { return c_; }
  double threshold() const { return alpha_; }
  double slope_magnitude() const { return s_; }

  double marginal(double dx) const {
    check_size(dx);
    return dx <= alpha_ ? c_ : (dx - alpha_) / s_ + c_;
  }

  // integral of marginal() from 0 to dx
  double total_cost(double dx) const {
    check_size(dx);
    const double base = c_ * dx;
    if (dx <= alpha_) return base;
    const double over = dx - alpha_;
    return base + over * over / (2.0 * s_);
  }

  double cost(double /*q*/, double dx) const { return total_cost(std::abs(dx)); }

 private:
  static void check_size(double dx) {
    if (!(dx >= 0.0)) {
      throw std::domain_error("PiecewiseMarginalCost: trade size must be non-negative, got " +
                              std::to_string(dx));
    }
  }

  double c_;
  double alpha_;
  double s_;
};

}  // namespace lvrlab
