#pragma once
// L2 order-book ingestion and marginal-liquidity estimation.
//
// The hedge venue's marginal depth |x~'(Q)| is estimated by regressing
// signed cumulative depth on price distance from mid, through the origin:
// ask depth counts positive above mid, bid depth negative below. The same
// machinery also reads off the piecewise cost parameters: half-spread as the
// constant marginal cost, top-of-book size as the threshold, and the slope
// refitted on the levels beyond the touch.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "lvrlab/cost_models.hpp"
#include "lvrlab/detail/text.hpp"
#include "lvrlab/errors.hpp"

namespace lvrlab {

struct BookLevel {
  double price = 0.0;
  double size = 0.0;
};

struct DepthSnapshot {
  std::vector<BookLevel> bids;  // sorted descending by price
  std::vector<BookLevel> asks;  // sorted ascending by price
  std::string timestamp;        // optional label, e.g. source file name

  double best_bid() const { return bids.front().price; }
  double best_ask() const { return asks.front().price; }
  double mid() const { return 0.5 * (best_bid() + best_ask()); }
};

// CSV with header "side,price,size", side in {bid, ask}. Rows may arrive in
// any order; sides are sorted on load. Crossed books and non-positive
// prices or sizes are rejected.
inline DepthSnapshot parse_snapshot(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty snapshot");
  ++line_no;
  if (detail::trim(line) != "side,price,size") {
    throw ParseError(line_no,
                     "expected header 'side,price,size', got '" + std::string(detail::trim(line)) + "'");
  }

  DepthSnapshot snap;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const auto fields = detail::split(row, ',');
    if (fields.size() != 3) throw ParseError(line_no, "expected three fields 'side,price,size'");
    const std::string_view side = detail::trim(fields[0]);
    const double price = detail::parse_double(fields[1], line_no, "price");
    const double size = detail::parse_double(fields[2], line_no, "size");
    if (!(std::isfinite(price) && price > 0.0)) {
      throw ValidationError("all prices must be positive (line " + std::to_string(line_no) + ")");
    }
    if (!(std::isfinite(size) && size > 0.0)) {
      throw ValidationError("all sizes must be positive (line " + std::to_string(line_no) + ")");
    }
    if (side == "bid") {
      snap.bids.push_back({price, size});
    } else if (side == "ask") {
      snap.asks.push_back({price, size});
    } else {
      throw ParseError(line_no, "side must be 'bid' or 'ask', got '" + std::string(side) + "'");
    }
  }

  if (snap.bids.empty()) throw ValidationError("snapshot has no bid levels");
  if (snap.asks.empty()) throw ValidationError("snapshot has no ask levels");
  std::sort(snap.bids.begin(), snap.bids.end(),
            [](const BookLevel& a, const BookLevel& b) { return a.price > b.price; });
  std::sort(snap.asks.begin(), snap.asks.end(),
            [](const BookLevel& a, const BookLevel& b) { return a.price < b.price; });
  if (snap.best_bid() >= snap.best_ask()) {
    throw ValidationError("crossed book: best bid " + std::to_string(snap.best_bid()) +
                          " >= best ask " + std::to_string(snap.best_ask()));
  }
  return snap;
}

struct SlopeEstimate {
  double slope_magnitude = 0.0;  // risky units per unit price
  double mid = 0.0;
  double window_bps = 0.0;
  double r2 = 0.0;
  std::size_t n_levels = 0;
  double bid_slope = 0.0;  // per-side diagnostics
  double ask_slope = 0.0;
};

namespace detail {

struct DepthPoint {
  double dp = 0.0;     // price distance from the regression anchor
  double depth = 0.0;  // signed cumulative size
};

// Cumulative depth per side inside the window around mid, anchored at mid.
inline std::pair<std::vector<DepthPoint>, std::vector<DepthPoint>> collect_depth_points(
    const DepthSnapshot& book, double mid, double half_width) {
  std::vector<DepthPoint> bid_pts, ask_pts;
  double cum = 0.0;
  for (const BookLevel& lvl : book.asks) {
    if (lvl.price - mid > half_width) break;
    cum += lvl.size;
    ask_pts.push_back({lvl.price - mid, cum});
  }
  cum = 0.0;
  for (const BookLevel& lvl : book.bids) {
    if (mid - lvl.price > half_width) break;
    cum += lvl.size;
    bid_pts.push_back({lvl.price - mid, -cum});
  }
  return {std::move(bid_pts), std::move(ask_pts)};
}

// Incremental depth beyond the touch: per side, skip the best level, rebase
// cumulative size to 0 there and measure price distance from the touch. This
// is the growth rate that drives the marginal cost past the threshold.
inline std::pair<std::vector<DepthPoint>, std::vector<DepthPoint>> collect_beyond_touch_points(
    const DepthSnapshot& book, double mid, double half_width) {
  std::vector<DepthPoint> bid_pts, ask_pts;
  double cum = 0.0;
  for (std::size_t i = 1; i < book.asks.size(); ++i) {
    if (book.asks[i].price - mid > half_width) break;
    cum += book.asks[i].size;
    ask_pts.push_back({book.asks[i].price - book.best_ask(), cum});
  }
  cum = 0.0;
  for (std::size_t i = 1; i < book.bids.size(); ++i) {
    if (mid - book.bids[i].price > half_width) break;
    cum += book.bids[i].size;
    bid_pts.push_back({book.bids[i].price - book.best_bid(), -cum});
  }
  return {std::move(bid_pts), std::move(ask_pts)};
}

inline double fit_through_origin(const std::vector<DepthPoint>& pts) {
  double sxx = 0.0, sxd = 0.0;
  for (const auto& p : pts) {
    sxx += p.dp * p.dp;
    sxd += p.dp * p.depth;
  }
  if (sxx == 0.0) throw ZeroVarianceError("all regression levels share one price");
  return sxd / sxx;
}

inline SlopeEstimate fit_slope(std::vector<DepthPoint> bid_pts, std::vector<DepthPoint> ask_pts,
                               double mid, double window_bps) {
  if (bid_pts.size() < 2 || ask_pts.size() < 2) {
    throw InsufficientLevelsError("need at least 2 levels per side inside the window, got " +
                                  std::to_string(bid_pts.size()) + " bid / " +
                                  std::to_string(ask_pts.size()) + " ask");
  }

  SlopeEstimate est;
  est.mid = mid;
  est.window_bps = window_bps;
  est.bid_slope = fit_through_origin(bid_pts);
  est.ask_slope = fit_through_origin(ask_pts);

  std::vector<DepthPoint>& pooled = bid_pts;
  pooled.insert(pooled.end(), ask_pts.begin(), ask_pts.end());
  est.slope_magnitude = fit_through_origin(pooled);
  est.n_levels = pooled.size();

  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : pooled) {
    const double resid = p.depth - est.slope_magnitude * p.dp;
    ss_res += resid * resid;
    ss_tot += p.depth * p.depth;  // uncentered: the fit passes through the origin
  }
  est.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return est;
}

inline double window_half_width(double mid, double window_bps) {
  if (!(std::isfinite(window_bps) && window_bps > 0.0)) {
    throw std::invalid_argument("window_bps must be positive");
  }
  return mid * window_bps * 1e-4;
}

}  // namespace detail

// Pooled through-origin regression of signed cumulative depth on (price -
// mid) over all levels within window_bps of mid. At least two levels per
// side must fall inside the window.
inline SlopeEstimate estimate_slope(const DepthSnapshot& book, double window_bps = 50.0) {
  const double mid = book.mid();
  auto [bid_pts, ask_pts] =
      detail::collect_depth_points(book, mid, detail::window_half_width(mid, window_bps));
  return detail::fit_slope(std::move(bid_pts), std::move(ask_pts), mid, window_bps);
}

// Piecewise cost parameters read off a snapshot: c = half-spread, alpha =
// average touch size, slope fitted on the incremental depth beyond the touch
// (window still measured around mid).
inline PiecewiseMarginalCost fit_piecewise_cost(const DepthSnapshot& book,
                                                double window_bps = 50.0) {
  const double c = 0.5 * (book.best_ask() - book.best_bid());
  const double alpha = 0.5 * (book.bids.front().size + book.asks.front().size);
  const double mid = book.mid();
  auto [bid_pts, ask_pts] =
      detail::collect_beyond_touch_points(book, mid, detail::window_half_width(mid, window_bps));
  const SlopeEstimate beyond =
      detail::fit_slope(std::move(bid_pts), std::move(ask_pts), mid, window_bps);
  return PiecewiseMarginalCost(c, alpha, beyond.slope_magnitude);
}

}  // namespace lvrlab
