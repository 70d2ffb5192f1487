#pragma once
// Liquidity curves for the two venues. A curve maps an exchange rate Q
// (numeraire per risky unit) to the venue's equilibrium holdings:
//
//   reserves_risky(Q)      equilibrium risky reserves
//   reserves_numeraire(Q)  equilibrium numeraire reserves
//   slope(Q)               d(reserves_risky)/dQ, signed (<= 0: demand slopes down)
//   value(Q)               Q * reserves_risky(Q) + reserves_numeraire(Q)
//
// Two concrete curves are provided: the constant-product pool and a tabulated
// curve built from (Q, x) samples via monotone cubic interpolation. Curves are
// immutable after construction and safe to read from any number of threads.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lvrlab/detail/text.hpp"
#include "lvrlab/errors.hpp"

namespace lvrlab {

template <class C>
concept liquidity_curve = requires(const C& c, double q) {
  { c.reserves_risky(q) } -> std::convertible_to<double>;
  { c.reserves_numeraire(q) } -> std::convertible_to<double>;
  { c.slope(q) } -> std::convertible_to<double>;
  { c.value(q) } -> std::convertible_to<double>;
};

// Constant-product pool with invariant x*y = K^2, parameterized by the
// invariant root K = sqrt(x*y). Domain is every positive price.
class CpmmCurve {
 public:
  explicit CpmmCurve(double invariant_root) : k_(invariant_root) {
    if (!(std::isfinite(k_) && k_ > 0.0)) {
      throw std::invalid_argument("CpmmCurve: invariant root must be positive and finite");
    }
  }

  double invariant_root() const { return k_; }

  // x(Q) = K / sqrt(Q)
  double reserves_risky(double q) const {
    check_price(q);
    return k_ / std::sqrt(q);
  }

  // y(Q) = K * sqrt(Q)
  double reserves_numeraire(double q) const {
    check_price(q);
    return k_ * std::sqrt(q);
  }

  // x'(Q) = -K / (2 Q^(3/2)); |x'(Q)| = x(Q) / (2Q)
  double slope(double q) const {
    check_price(q);
    return -0.5 * k_ / (q * std::sqrt(q));
  }

  double value(double q) const { return q * reserves_risky(q) + reserves_numeraire(q); }

  double min_price() const { return 0.0; }
  double max_price() const { return std::numeric_limits<double>::infinity(); }

 private:
  static void check_price(double q) {
    if (!(std::isfinite(q) && q > 0.0)) {
      throw DomainError("CpmmCurve: price must be positive and finite, got " + std::to_string(q));
    }
  }

  double k_;
};

// Demand curve tabulated as (Q_i, x_i) samples, interpolated with a
// shape-preserving (Fritsch-Butland) cubic Hermite. Requirements: at least
// four rows, strictly increasing positive Q, non-negative non-increasing x.
//
// The numeraire leg is reconstructed from the self-financing relation
// dy = -Q dx, anchored at y(Q_min) = 0:
//
//   y(Q) = integral_{Q_min}^{Q} x(u) du - (Q x(Q) - Q_min x(Q_min))
//
// which makes value(Q) = Q_min x(Q_min) + integral_{Q_min}^{Q} x(u) du, so
// value'(Q) = x(Q) holds exactly for the interpolant. Prices outside
// [Q_min, Q_max] are rejected.
class TabulatedCurve {
 public:
  TabulatedCurve(std::vector<double> prices, std::vector<double> reserves)
      : q_(std::move(prices)), x_(std::move(reserves)) {
    validate_samples();
    build_tangents();
    build_integrals();
  }

  // CSV with header "Q,x_star", one sample per row.
  static TabulatedCurve from_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty curve file");
    ++line_no;
    if (detail::trim(line) != "Q,x_star") {
      throw ParseError(line_no, "expected header 'Q,x_star', got '" + std::string(detail::trim(line)) + "'");
    }
    std::vector<double> qs, xs;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string_view row = detail::trim(line);
      if (row.empty()) continue;
      const auto fields = detail::split(row, ',');
      if (fields.size() != 2) throw ParseError(line_no, "expected two fields 'Q,x_star'");
      qs.push_back(detail::parse_double(fields[0], line_no, "Q"));
      xs.push_back(detail::parse_double(fields[1], line_no, "x_star"));
    }
    return TabulatedCurve(std::move(qs), std::move(xs));
  }

  static TabulatedCurve from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open curve file '" + path + "'");
    return from_csv(in);
  }

  double min_price() const { return q_.front(); }
  double max_price() const { return q_.back(); }

  double reserves_risky(double q) const {
    const std::size_t i = locate(q);
    const Eval e = eval_basis(i, q);
    return e.h00 * x_[i] + e.h10 * h(i) * m_[i] + e.h01 * x_[i + 1] + e.h11 * h(i) * m_[i + 1];
  }

  double slope(double q) const {
    const std::size_t i = locate(q);
    const double hi = h(i);
    const double t = (q - q_[i]) / hi;
    const double d00 = (6.0 * t * t - 6.0 * t) / hi;
    const double d10 = 3.0 * t * t - 4.0 * t + 1.0;
    const double d01 = (-6.0 * t * t + 6.0 * t) / hi;
    const double d11 = 3.0 * t * t - 2.0 * t;
    return d00 * x_[i] + d10 * m_[i] + d01 * x_[i + 1] + d11 * m_[i + 1];
  }

  double reserves_numeraire(double q) const {
    return value(q) - q * reserves_risky(q);
  }

  double value(double q) const {
    const std::size_t i = locate(q);
    return q_.front() * x_.front() + integral_[i] + partial_integral(i, q);
  }

 private:
  struct Eval {
    double h00, h10, h01, h11;
  };

  double h(std::size_t i) const { return q_[i + 1] - q_[i]; }

  void validate_samples() {
    if (q_.size() != x_.size()) throw ValidationError("tabulated curve: Q and x_star counts differ");
    if (q_.size() < 4) throw ValidationError("tabulated curve: needs at least 4 rows, got " + std::to_string(q_.size()));
    if (!(std::isfinite(q_.front()) && q_.front() > 0.0)) {
      throw ValidationError("tabulated curve: prices must be positive");
    }
    for (std::size_t i = 0; i < q_.size(); ++i) {
      if (!std::isfinite(q_[i]) || !std::isfinite(x_[i])) {
        throw ValidationError("tabulated curve: non-finite sample at row " + std::to_string(i + 1));
      }
      if (x_[i] < 0.0) throw ValidationError("tabulated curve: reserves must be non-negative");
      if (i > 0) {
        if (q_[i] <= q_[i - 1]) throw ValidationError("tabulated curve: Q must be strictly increasing");
        if (x_[i] > x_[i - 1]) {
          throw ValidationError("tabulated curve: reserves must be non-increasing in Q (demand slopes down)");
        }
      }
    }
  }

  // Fritsch-Butland tangents: monotone on every interval.
  void build_tangents() {
    const std::size_t n = q_.size();
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (x_[i + 1] - x_[i]) / h(i);
    m_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] > 0.0) {
        const double w1 = 2.0 * h(i) + h(i - 1);
        const double w2 = h(i) + 2.0 * h(i - 1);
        m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
      }
    }
    m_[0] = edge_tangent(h(0), h(1), d[0], d[1]);
    m_[n - 1] = edge_tangent(h(n - 2), h(n - 3), d[n - 2], d[n - 3]);
  }

  static double edge_tangent(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  }

  void build_integrals() {
    integral_.assign(q_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < q_.size(); ++i) {
      const double hi = h(i);
      integral_[i + 1] =
          integral_[i] + hi * (0.5 * (x_[i] + x_[i + 1]) + hi * (m_[i] - m_[i + 1]) / 12.0);
    }
  }

  std::size_t locate(double q) const {
    if (!(std::isfinite(q)) || q < q_.front() || q > q_.back()) {
      throw DomainError("tabulated curve: price " + std::to_string(q) + " outside domain [" +
                        std::to_string(q_.front()) + ", " + std::to_string(q_.back()) + "]");
    }
    const auto it = std::upper_bound(q_.begin(), q_.end(), q);
    const std::size_t idx = static_cast<std::size_t>(it - q_.begin());
    return idx == 0 ? 0 : std::min(idx - 1, q_.size() - 2);
  }

  Eval eval_basis(std::size_t i, double q) const {
    const double t = (q - q_[i]) / h(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    return {2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t, -2.0 * t3 + 3.0 * t2, t3 - t2};
  }

  // integral of the interpolant over [q_i, q], exact per cubic piece
  double partial_integral(std::size_t i, double q) const {
    const double hi = h(i);
    const double s = (q - q_[i]) / hi;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double s4 = s3 * s;
    const double i00 = 0.5 * s4 - s3 + s;
    const double i10 = 0.25 * s4 - (2.0 / 3.0) * s3 + 0.5 * s2;
    const double i01 = -0.5 * s4 + s3;
    const double i11 = 0.25 * s4 - s3 / 3.0;
    return hi * (i00 * x_[i] + i10 * hi * m_[i] + i01 * x_[i + 1] + i11 * hi * m_[i + 1]);
  }

  std::vector<double> q_;
  std::vector<double> x_;
  std::vector<double> m_;         // tangents dx/dQ at the knots
  std::vector<double> integral_;  // cumulative integral of x from Q_min to each knot
};

// ---------------------------------------------------------------------------
// Marginal-liquidity views of the liquid venue. The trading-cost model and
// the closed-form rates only need |x'(Q)| of that venue, so the engine works
// against this narrower interface.

template <class S>
concept marginal_liquidity = requires(const S& s, double q) {
  { s.slope_magnitude(q) } -> std::convertible_to<double>;
};

// Infinite marginal depth: the classical frictionless benchmark.
struct PerfectlyLiquidVenue {
  double slope_magnitude(double) const { return std::numeric_limits<double>::infinity(); }
};

// Price-independent marginal depth.
class FixedSlope {
 public:
  explicit FixedSlope(double slope_magnitude) : s_(slope_magnitude) {
    if (!(std::isfinite(s_) && s_ > 0.0)) {
      throw std::invalid_argument("FixedSlope: slope magnitude must be positive and finite");
    }
  }

  double slope_magnitude(double) const { return s_; }

 private:
  double s_;
};

// Adapter exposing |slope(Q)| of a full curve.
template <liquidity_curve C>
class CurveSlope {
 public:
  explicit CurveSlope(C curve) : curve_(std::move(curve)) {}

  double slope_magnitude(double q) const { return std::abs(curve_.slope(q)); }

  const C& curve() const { return curve_; }

 private:
  C curve_;
};

}  // namespace lvrlab
