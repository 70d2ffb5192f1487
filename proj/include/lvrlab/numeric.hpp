#pragma once
// Small numeric helpers: compensated summation, sample statistics, and the
// log-log regression used by convergence studies. Accumulation order is fixed
// so results are reproducible regardless of worker count.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace lvrlab {

// Neumaier variant of Kahan summation.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanStdError {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
};

inline MeanStdError mean_std_error(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  NeumaierSum s;
  for (double x : xs) s.add(x);
  const double mean = s.value() / static_cast<double>(n);
  if (n == 1) return {mean, 0.0};
  NeumaierSum sq;
  for (double x : xs) {
    const double d = x - mean;
    sq.add(d * d);
  }
  const double var = std::max(0.0, sq.value() / static_cast<double>(n - 1));
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

// Ratio-of-means estimator with a delta-method standard error. Used for
// normalized quantities like (arbitrage gain) / (time-integrated pool value).
inline MeanStdError ratio_of_means(std::span<const double> num, std::span<const double> den) {
  const std::size_t n = num.size();
  if (n == 0 || den.size() != n) {
    return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  }
  NeumaierSum sa, sb;
  for (std::size_t i = 0; i < n; ++i) {
    sa.add(num[i]);
    sb.add(den[i]);
  }
  const double a = sa.value() / static_cast<double>(n);
  const double b = sb.value() / static_cast<double>(n);
  const double ratio = a / b;
  if (n == 1) return {ratio, 0.0};
  NeumaierSum vaa, vbb, vab;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = num[i] - a;
    const double db = den[i] - b;
    vaa.add(da * da);
    vbb.add(db * db);
    vab.add(da * db);
  }
  const double inv = 1.0 / static_cast<double>(n - 1);
  const double var_a = vaa.value() * inv;
  const double var_b = vbb.value() * inv;
  const double cov = vab.value() * inv;
  const double var_ratio =
      (var_a - 2.0 * ratio * cov + ratio * ratio * var_b) / (b * b * static_cast<double>(n));
  return {ratio, std::sqrt(std::max(0.0, var_ratio))};
}

struct LineFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
};

// Ordinary least squares of y on x.
inline LineFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) return {};
  NeumaierSum sx, sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(xs[i]);
    sy.add(ys[i]);
  }
  const double mx = sx.value() / static_cast<double>(n);
  const double my = sy.value() / static_cast<double>(n);
  NeumaierSum sxx, sxy, syy;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (sxx.value() == 0.0) return {};
  LineFit f;
  f.slope = sxy.value() / sxx.value();
  f.intercept = my - f.slope * mx;
  f.r2 = syy.value() == 0.0 ? 1.0 : (sxy.value() * sxy.value()) / (sxx.value() * syy.value());
  return f;
}

// Fit ln(y) = slope * ln(x) + intercept. Pairs with non-positive or
// non-finite entries are dropped; fewer than two survivors yields NaNs.
inline LineFit loglog_fit(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> lx, ly;
  lx.reserve(xs.size());
  ly.reserve(ys.size());
  const std::size_t n = xs.size() < ys.size() ? xs.size() : ys.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (xs[i] > 0.0 && ys[i] > 0.0 && std::isfinite(xs[i]) && std::isfinite(ys[i])) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  }
  return linear_fit(lx, ly);
}

}  // namespace lvrlab
