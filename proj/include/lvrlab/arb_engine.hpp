#pragma once
// The discretized arbitrage between the pool and the hedge venue.
//
// Per grid step the arbitrageur moves the pool from its equilibrium at the
// previous signal to the new one: it takes dx = x(q_prev) - x(q_new) risky
// units out of the pool, pays dy = y(q_new) - y(q_prev) numeraire in, unwinds
// dx on the hedge venue at the execution price, and bears that venue's
// trading cost evaluated at the pre-step price. Summing the per-step net over
// the grid gives the discrete arbitrage gain; alongside it the engine tracks
// the self-financing rebalancing value, the closed-form rate integrals, and
// the variation diagnostics used by convergence studies.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "lvrlab/analytics.hpp"
#include "lvrlab/cost_models.hpp"
#include "lvrlab/curves.hpp"
#include "lvrlab/errors.hpp"
#include "lvrlab/numeric.hpp"
#include "lvrlab/price_dynamics.hpp"

namespace lvrlab {

// Price at which the hedge leg executes. new_price is the default: the
// arbitrageur trades after observing the new signal, and with it the
// discrete sum telescopes exactly to rebalancing-value minus pool-value.
// previous_price executes at the stale price instead; the two differ per
// step by (q_new - q_prev) * dx.
enum class ExecutionPriceConvention { previous_price, new_price };

struct StepRecord {
  double t_prev = 0.0;
  double t_new = 0.0;
  double q_prev = 0.0;
  double q_new = 0.0;
  double dx = 0.0;     // risky units sold on the hedge venue
  double dy = 0.0;     // numeraire paid into the pool
  double gross = 0.0;  // execution_price * dx - dy
  double cost = 0.0;   // hedge-venue trading cost
  double net = 0.0;    // gross - cost
};

template <liquidity_curve C, cost_model M>
StepRecord run_step(const C& illiquid, const M& cost, double q_prev, double q_new,
                    ExecutionPriceConvention convention, double t_prev = 0.0, double t_new = 0.0) {
  StepRecord rec;
  rec.t_prev = t_prev;
  rec.t_new = t_new;
  rec.q_prev = q_prev;
  rec.q_new = q_new;
  rec.dx = illiquid.reserves_risky(q_prev) - illiquid.reserves_risky(q_new);
  rec.dy = illiquid.reserves_numeraire(q_new) - illiquid.reserves_numeraire(q_prev);
  const double px = convention == ExecutionPriceConvention::previous_price ? q_prev : q_new;
  rec.gross = px * rec.dx - rec.dy;
  rec.cost = cost.cost(q_prev, rec.dx);
  rec.net = rec.gross - rec.cost;
  return rec;
}

struct PathResult {
  double arb_gain = 0.0;             // sum of per-step net
  double rebal_value = 0.0;          // v0 + sum x(q_prev)*(q_new - q_prev) - total cost
  double lvr_closed = 0.0;           // integral of ell along the path
  double cost_total = 0.0;           // sum of per-step cost
  double quad_variation_cost = 0.0;  // sum of dx^2 / (2 |x~'(q_prev)|)
  double abs_variation = 0.0;        // sum of |dx|
  double convention_gap = 0.0;       // arb(new_price) - arb(previous_price) = sum (q_new - q_prev)*dx
  double cost_rate_integral = 0.0;   // integral of the cost drain rate along the path
  double value_time_integral = 0.0;  // integral of pool value along the path
  double v0 = 0.0;
  double vT = 0.0;
};

namespace detail {
struct NoopStepObserver {
  void operator()(const StepRecord&) const {}
};
}  // namespace detail

// Runs the full discretized arbitrage over one sampled path. sigma is the
// volatility the path was sampled with; it feeds the closed-form rate
// integrals evaluated on the same grid.
template <liquidity_curve CI, marginal_liquidity L, cost_model M,
          class StepObserver = detail::NoopStepObserver>
PathResult run_path(const CI& illiquid, const L& liquid, const M& cost,
                    ExecutionPriceConvention convention, double sigma, const PricePath& path,
                    StepObserver&& on_step = {}) {
  PathResult out;
  out.v0 = illiquid.value(path.price.front());
  out.vT = illiquid.value(path.price.back());

  NeumaierSum arb, costs, quad_var, abs_var, gap, gains, ell_int, cost_rate_int, value_int;
  for (std::size_t i = 1; i < path.price.size(); ++i) {
    const double q_prev = path.price[i - 1];
    const double q_new = path.price[i];
    const double dt = path.time[i] - path.time[i - 1];

    const StepRecord rec =
        run_step(illiquid, cost, q_prev, q_new, convention, path.time[i - 1], path.time[i]);
    on_step(rec);

    arb.add(rec.net);
    costs.add(rec.cost);
    abs_var.add(std::abs(rec.dx));
    gap.add((q_new - q_prev) * rec.dx);
    gains.add(illiquid.reserves_risky(q_prev) * (q_new - q_prev));

    const double liquid_slope = liquid.slope_magnitude(q_prev);
    quad_var.add(rec.dx * rec.dx / (2.0 * liquid_slope));

    const LvrParams rate{sigma, std::abs(illiquid.slope(q_prev)), liquid_slope, q_prev};
    ell_int.add(ell(rate) * dt);
    cost_rate_int.add(cost_rate(rate) * dt);
    value_int.add(illiquid.value(q_prev) * dt);
  }

  out.arb_gain = arb.value();
  out.cost_total = costs.value();
  out.quad_variation_cost = quad_var.value();
  out.abs_variation = abs_var.value();
  out.convention_gap = gap.value();
  out.rebal_value = out.v0 + gains.value() - out.cost_total;
  out.lvr_closed = ell_int.value();
  out.cost_rate_integral = cost_rate_int.value();
  out.value_time_integral = value_int.value();
  return out;
}

struct MetricSummary {
  double mean = 0.0;
  double se = 0.0;
};

struct ExperimentSummary {
  MetricSummary arb_gain;
  MetricSummary rebal_lvr;  // rebal_value - vT
  MetricSummary lvr_closed;
  MetricSummary cost_total;
  MetricSummary quad_variation_cost;
  MetricSummary abs_variation;
  MetricSummary convention_gap;
  MetricSummary cost_rate_integral;
  MetricSummary value_time_integral;
  MetricSummary v0;
  MetricSummary vT;
  std::int64_t paths = 0;
  std::int64_t steps = 0;
  std::uint64_t master_seed = 0;

  std::vector<std::pair<std::string_view, MetricSummary>> rows() const {
    return {{"arb_gain", arb_gain},
            {"rebal_lvr", rebal_lvr},
            {"lvr_closed", lvr_closed},
            {"cost_total", cost_total},
            {"quad_variation_cost", quad_variation_cost},
            {"abs_variation", abs_variation},
            {"convention_gap", convention_gap},
            {"cost_rate_integral", cost_rate_integral},
            {"value_time_integral", value_time_integral},
            {"v0", v0},
            {"vT", vT}};
  }
};

// Worker count: explicit request wins, then LVRLAB_THREADS, then the
// hardware count. Results never depend on the choice.
inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LVRLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Simulates `paths` independent paths. Path i uses the stream seed
// derive_seed(master_seed, i); failures are collected and reported together
// once every path has been attempted.
template <liquidity_curve CI, marginal_liquidity L, cost_model M>
std::vector<PathResult> simulate_paths(const GbmSpec& gbm, const CI& illiquid, const L& liquid,
                                       const M& cost, ExecutionPriceConvention convention,
                                       std::int64_t paths, std::uint64_t master_seed,
                                       int threads = 0) {
  gbm.validate();
  if (paths < 1) throw ConfigError("paths", "must be at least 1");

  const auto n = static_cast<std::size_t>(paths);
  std::vector<PathResult> results(n);
  std::vector<std::optional<std::string>> failures(n);

  const auto run_one = [&](std::size_t i) {
    try {
      const PricePath path = sample_path(gbm, derive_seed(master_seed, i));
      results[i] = run_path(illiquid, liquid, cost, convention, gbm.sigma, path);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  };

  const int workers = std::min<std::int64_t>(resolve_thread_count(threads), paths);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::size_t failed = 0;
  std::string detail;
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    ++failed;
    if (failed <= 5) {
      detail += "\n  path " + std::to_string(i) + ": " + *failures[i];
    }
  }
  if (failed > 0) {
    throw ExperimentError(std::to_string(failed) + " of " + std::to_string(n) +
                          " paths failed:" + detail + (failed > 5 ? "\n  ..." : ""));
  }
  return results;
}

inline ExperimentSummary summarize_experiment(const std::vector<PathResult>& results,
                                              std::int64_t steps, std::uint64_t master_seed) {
  ExperimentSummary s;
  s.paths = static_cast<std::int64_t>(results.size());
  s.steps = steps;
  s.master_seed = master_seed;

  std::vector<double> scratch(results.size());
  const auto reduce = [&](auto field) {
    for (std::size_t i = 0; i < results.size(); ++i) scratch[i] = field(results[i]);
    const MeanStdError m = mean_std_error(scratch);
    return MetricSummary{m.mean, m.se};
  };

  s.arb_gain = reduce([](const PathResult& r) { return r.arb_gain; });
  s.rebal_lvr = reduce([](const PathResult& r) { return r.rebal_value - r.vT; });
  s.lvr_closed = reduce([](const PathResult& r) { return r.lvr_closed; });
  s.cost_total = reduce([](const PathResult& r) { return r.cost_total; });
  s.quad_variation_cost = reduce([](const PathResult& r) { return r.quad_variation_cost; });
  s.abs_variation = reduce([](const PathResult& r) { return r.abs_variation; });
  s.convention_gap = reduce([](const PathResult& r) { return r.convention_gap; });
  s.cost_rate_integral = reduce([](const PathResult& r) { return r.cost_rate_integral; });
  s.value_time_integral = reduce([](const PathResult& r) { return r.value_time_integral; });
  s.v0 = reduce([](const PathResult& r) { return r.v0; });
  s.vT = reduce([](const PathResult& r) { return r.vT; });
  return s;
}

}  // namespace lvrlab
