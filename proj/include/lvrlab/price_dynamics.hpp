#pragma once
// Exact sampling of the zero-drift geometric Brownian price signal
//
//   dQ/Q = sigma dB
//
// on a uniform grid: Q_{i+1} = Q_i * exp(sigma*sqrt(dt)*Z - sigma^2*dt/2)
// with Z drawn through the normal quantile function from a counter-based
// generator. Each (spec, seed) pair yields one bit-reproducible path, so
// paths can be generated in parallel under any schedule.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lvrlab/errors.hpp"

namespace lvrlab {

struct GbmSpec {
  double q0 = 1.0;       // initial price, > 0
  double sigma = 0.2;    // volatility per sqrt(time unit), >= 0
  double horizon = 1.0;  // T, > 0
  std::int64_t steps = 10000;

  void validate() const {
    if (!(std::isfinite(q0) && q0 > 0.0)) throw ConfigError("q0", "must be positive and finite");
    if (!(std::isfinite(sigma) && sigma >= 0.0)) throw ConfigError("sigma", "must be non-negative and finite");
    if (!(std::isfinite(horizon) && horizon > 0.0)) throw ConfigError("horizon", "must be positive and finite");
    if (steps < 1) throw ConfigError("steps", "must be at least 1");
  }
};

struct PricePath {
  std::vector<double> time;   // N+1 grid points, time[0]=0, time[N]=horizon
  std::vector<double> price;  // N+1 prices, price[0]=q0

  std::size_t step_count() const { return price.empty() ? 0 : price.size() - 1; }
};

// SplitMix64: the state is a counter, the output a bijective mix of it.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform on the open interval (0, 1)
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_bits(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream seed for one path of an experiment. Well-mixed so per-path streams
// neither overlap nor correlate for any (master, index) layout.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t path_index) {
  return mix_bits(master_seed ^ mix_bits(path_index));
}

// Normal quantile (inverse CDF), Wichura's AS 241 double-precision fit.
inline double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("normal_quantile: argument must lie in (0, 1)");
  }
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                   6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
               1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return num / den;
  }
  double r = u < 0.5 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return u < 0.5 ? -val : val;
}

// One exact-in-distribution GBM path for (spec, seed).
inline PricePath sample_path(const GbmSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.steps);
  const double dt = spec.horizon / static_cast<double>(spec.steps);
  const double vol = spec.sigma * std::sqrt(dt);
  const double drift = -0.5 * spec.sigma * spec.sigma * dt;

  PricePath path;
  path.time.resize(n + 1);
  path.price.resize(n + 1);
  path.time[0] = 0.0;
  path.price[0] = spec.q0;

  CounterRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = normal_quantile(rng.next_uniform());
    path.price[i + 1] = path.price[i] * std::exp(vol * z + drift);
    path.time[i + 1] = spec.horizon * (static_cast<double>(i + 1) / static_cast<double>(spec.steps));
  }
  return path;
}

}  // namespace lvrlab
