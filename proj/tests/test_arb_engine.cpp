#include <catch2/catch.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include "lvrlab/analytics.hpp"
#include "lvrlab/arb_engine.hpp"
#include "lvrlab/experiment.hpp"
#include "test_helpers.hpp"

using lvrlab::CpmmCurve;
using lvrlab::CurveSlope;
using lvrlab::ExecutionPriceConvention;
using lvrlab::ExperimentError;
using lvrlab::ExperimentSummary;
using lvrlab::FixedSlope;
using lvrlab::GbmSpec;
using lvrlab::PathResult;
using lvrlab::PerfectlyLiquidVenue;
using lvrlab::PiecewiseMarginalCost;
using lvrlab::PricePath;
using lvrlab::QuadraticCost;
using lvrlab::run_path;
using lvrlab::run_step;
using lvrlab::SimConfig;
using lvrlab::StepRecord;
using testutil::rel_err;

namespace {

constexpr auto kNew = ExecutionPriceConvention::new_price;
constexpr auto kPrev = ExecutionPriceConvention::previous_price;

SimConfig cpmm_config(double sigma, std::int64_t steps, std::int64_t paths, double r) {
  SimConfig cfg;
  cfg.gbm.q0 = 1.0;
  cfg.gbm.sigma = sigma;
  cfg.gbm.horizon = 1.0;
  cfg.gbm.steps = steps;
  cfg.paths = paths;
  cfg.master_seed = 7;
  cfg.threads = 1;
  cfg.illiquid = lvrlab::CpmmConfig{1.0};
  if (std::isinf(r)) {
    cfg.liquid = lvrlab::PerfectLiquidityConfig{};
  } else {
    cfg.liquid = lvrlab::CpmmConfig{r};
  }
  return cfg;
}

}  // namespace

TEST_CASE("a step with no price move is all zeros") {
  const CpmmCurve pool(1.0);
  const QuadraticCost cost{FixedSlope(5.0)};
  const StepRecord rec = run_step(pool, cost, 1.3, 1.3, kNew);
  CHECK(rec.dx == 0.0);
  CHECK(rec.dy == 0.0);
  CHECK(rec.gross == 0.0);
  CHECK(rec.cost == 0.0);
  CHECK(rec.net == 0.0);
}

TEST_CASE("step arithmetic at the reference move 1 -> 1.21") {
  const CpmmCurve pool(1.0);
  const QuadraticCost cost{FixedSlope(5.0)};
  const StepRecord rec = run_step(pool, cost, 1.0, 1.21, kNew);
  CHECK(rec.dx == Approx(1.0 - 1.0 / 1.1).epsilon(1e-12));
  CHECK(rec.dy == Approx(0.1).epsilon(1e-12));
  CHECK(rec.gross == Approx(0.01).epsilon(1e-10));
  CHECK(rec.cost == Approx(rec.dx * rec.dx / 10.0).epsilon(1e-12));
  CHECK(rec.cost == Approx(8.2645e-4).epsilon(1e-4));
  CHECK(rec.net == Approx(rec.gross - rec.cost).epsilon(1e-15));
}

TEST_CASE("conventions differ by (q_new - q_prev) * dx per step") {
  const CpmmCurve pool(1.4);
  const QuadraticCost cost{FixedSlope(2.0)};
  testutil::Sampler rnd(401);
  for (int i = 0; i < 100; ++i) {
    const double q_prev = rnd.log_uniform(0.2, 5.0);
    const double q_new = rnd.log_uniform(0.2, 5.0);
    const StepRecord a = run_step(pool, cost, q_prev, q_new, kNew);
    const StepRecord b = run_step(pool, cost, q_prev, q_new, kPrev);
    CAPTURE(q_prev, q_new);
    CHECK(rel_err(a.gross - b.gross, (q_new - q_prev) * a.dx) <= 1e-12);
    CHECK(a.cost == b.cost);
  }
}

TEST_CASE("constant path yields zero gain and an intact rebalancing value") {
  GbmSpec spec;
  spec.sigma = 0.0;
  spec.q0 = 2.0;
  spec.steps = 50;
  const PricePath path = lvrlab::sample_path(spec, 5);
  const CpmmCurve pool(1.0);
  const PathResult res =
      run_path(pool, PerfectlyLiquidVenue{}, QuadraticCost{PerfectlyLiquidVenue{}}, kNew,
               spec.sigma, path);
  CHECK(res.arb_gain == 0.0);
  CHECK(res.cost_total == 0.0);
  CHECK(res.rebal_value == res.v0);
  CHECK(res.v0 == res.vT);
  CHECK(res.lvr_closed == 0.0);
  CHECK(res.abs_variation == 0.0);
}

TEST_CASE("a one-step path reduces to run_step") {
  PricePath path;
  path.time = {0.0, 1.0};
  path.price = {1.0, 1.21};
  const CpmmCurve pool(1.0);
  const QuadraticCost cost{FixedSlope(5.0)};
  const PathResult res = run_path(pool, FixedSlope(5.0), cost, kNew, 0.2, path);
  const StepRecord rec = run_step(pool, cost, 1.0, 1.21, kNew);
  CHECK(res.arb_gain == rec.net);
  CHECK(res.cost_total == rec.cost);
  CHECK(res.abs_variation == std::abs(rec.dx));
}

TEST_CASE("gain equals rebalancing value minus pool value, path by path") {
  // exact telescoping under the new-price convention, up to accumulation noise
  for (double r : {2.0, 4.0}) {
    SimConfig cfg = cpmm_config(0.2, 1000, 50, r);
    const std::vector<PathResult> results = lvrlab::run_paths(cfg);
    for (const PathResult& res : results) {
      const double lhs = res.arb_gain;
      const double rhs = res.rebal_value - res.vT;
      CAPTURE(r, lhs, rhs);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max({std::abs(lhs), std::abs(rhs), 1e-6}));
    }
  }
}

TEST_CASE("identity also holds with a piecewise cost model") {
  SimConfig cfg = cpmm_config(0.2, 1000, 20, std::numeric_limits<double>::infinity());
  cfg.cost = lvrlab::PiecewiseCostConfig{0.01, 1.0, 2.0};
  const std::vector<PathResult> results = lvrlab::run_paths(cfg);
  for (const PathResult& res : results) {
    const double rhs = res.rebal_value - res.vT;
    CHECK(std::abs(res.arb_gain - rhs) <=
          1e-10 * std::max({std::abs(res.arb_gain), std::abs(rhs), 1e-6}));
    CHECK(res.cost_total > 0.0);
  }
}

TEST_CASE("convention gap accumulates the per-step identity") {
  SimConfig cfg = cpmm_config(0.3, 400, 10, 2.0);
  cfg.convention = kNew;
  const std::vector<PathResult> with_new = lvrlab::run_paths(cfg);
  cfg.convention = kPrev;
  const std::vector<PathResult> with_prev = lvrlab::run_paths(cfg);
  REQUIRE(with_new.size() == with_prev.size());
  for (std::size_t i = 0; i < with_new.size(); ++i) {
    const double gap = with_new[i].arb_gain - with_prev[i].arb_gain;
    CAPTURE(i);
    CHECK(rel_err(gap, with_new[i].convention_gap) <= 1e-9);
    CHECK(with_new[i].convention_gap == with_prev[i].convention_gap);
  }
}

TEST_CASE("with costs disabled the gain reduces to the costless discretization") {
  SimConfig cfg = cpmm_config(0.2, 500, 30, std::numeric_limits<double>::infinity());
  const std::vector<PathResult> results = lvrlab::run_paths(cfg);
  for (const PathResult& res : results) {
    CHECK(res.cost_total == 0.0);
    CHECK(res.quad_variation_cost == 0.0);
    // costless discretization: v0 - vT + sum x(q_prev) dQ
    const double costless = res.rebal_value - res.vT;  // rebal has no cost here
    CHECK(std::abs(res.arb_gain - costless) <= 1e-10 * std::max(std::abs(costless), 1e-6));
  }
}

TEST_CASE("closed-form integrals from the engine match the analytics routines") {
  const CpmmCurve pool(1.0);
  const CurveSlope<CpmmCurve> hedge{CpmmCurve(2.0)};
  GbmSpec spec;
  spec.sigma = 0.25;
  spec.steps = 300;
  const PricePath path = lvrlab::sample_path(spec, 77);
  const PathResult res =
      run_path(pool, hedge, QuadraticCost{hedge}, kNew, spec.sigma, path);
  CHECK(rel_err(res.lvr_closed, lvrlab::integrate_ell(path, pool, hedge, spec.sigma)) <= 1e-12);
  CHECK(rel_err(res.cost_rate_integral,
                lvrlab::integrate_cost_rate(path, pool, hedge, spec.sigma)) <= 1e-12);
}

TEST_CASE("step observer sees every step and matches variation stats") {
  const CpmmCurve pool(1.0);
  const FixedSlope hedge(5.0);
  GbmSpec spec;
  spec.sigma = 0.2;
  spec.steps = 100;
  const PricePath path = lvrlab::sample_path(spec, 11);
  std::vector<StepRecord> records;
  const PathResult res = run_path(pool, hedge, QuadraticCost{hedge}, kNew, spec.sigma, path,
                                  [&](const StepRecord& r) { records.push_back(r); });
  REQUIRE(records.size() == 100);
  const auto stats = lvrlab::variation_stats(records, hedge);
  CHECK(rel_err(stats.quadratic_cost, res.quad_variation_cost) <= 1e-13);
  CHECK(rel_err(stats.absolute, res.abs_variation) <= 1e-13);
}

TEST_CASE("experiment summaries are deterministic and thread-invariant") {
  SimConfig cfg = cpmm_config(0.2, 200, 64, 2.0);
  cfg.threads = 1;
  const ExperimentSummary a = lvrlab::run_experiment(cfg);
  const ExperimentSummary b = lvrlab::run_experiment(cfg);
  cfg.threads = 4;
  const ExperimentSummary c = lvrlab::run_experiment(cfg);
  CHECK(a.arb_gain.mean == b.arb_gain.mean);
  CHECK(a.arb_gain.se == b.arb_gain.se);
  CHECK(a.arb_gain.mean == c.arb_gain.mean);
  CHECK(a.lvr_closed.mean == c.lvr_closed.mean);
  CHECK(a.cost_total.mean == c.cost_total.mean);
  CHECK(a.convention_gap.mean == c.convention_gap.mean);
}

TEST_CASE("a single-path experiment reduces to run_path") {
  SimConfig cfg = cpmm_config(0.2, 100, 1, 2.0);
  const std::vector<PathResult> results = lvrlab::run_paths(cfg);
  REQUIRE(results.size() == 1);

  const PricePath path = lvrlab::sample_path(cfg.gbm, lvrlab::derive_seed(cfg.master_seed, 0));
  const CpmmCurve pool(1.0);
  const CurveSlope<CpmmCurve> hedge{CpmmCurve(2.0)};
  const PathResult direct =
      run_path(pool, hedge, QuadraticCost{hedge}, kNew, cfg.gbm.sigma, path);
  CHECK(results[0].arb_gain == direct.arb_gain);
  CHECK(results[0].rebal_value == direct.rebal_value);
  CHECK(results[0].cost_total == direct.cost_total);
}

TEST_CASE("paths leaving a tabulated domain fail the experiment with diagnostics") {
  testutil::ScratchDir dir("tabdomain");
  const auto csv = dir.path() / "curve.csv";
  std::ofstream(csv) << "Q,x_star\n0.9,1.2\n0.95,1.1\n1.05,0.9\n1.1,0.8\n";

  SimConfig cfg;
  cfg.gbm.sigma = 0.5;  // wanders far outside [0.9, 1.1] almost surely
  cfg.gbm.steps = 100;
  cfg.paths = 8;
  cfg.threads = 1;
  cfg.illiquid = lvrlab::TabulatedConfig{csv.string()};
  cfg.liquid = lvrlab::PerfectLiquidityConfig{};
  try {
    lvrlab::run_paths(cfg);
    FAIL("expected ExperimentError");
  } catch (const ExperimentError& e) {
    CHECK(std::string(e.what()).find("path") != std::string::npos);
    CHECK(std::string(e.what()).find("outside domain") != std::string::npos);
  }
}

TEST_CASE("negative rates are reported unclamped when the hedge venue is shallower") {
  SimConfig cfg = cpmm_config(0.2, 400, 200, 0.5);  // r < 1
  const ExperimentSummary s = lvrlab::run_experiment(cfg);
  CHECK(s.lvr_closed.mean < 0.0);
  CHECK(s.arb_gain.mean < 0.0);
}

TEST_CASE("realized quadratic variation approaches its continuous-time counterpart") {
  // Paired comparison on identical paths. The systematic part of the gap
  // shrinks like 1/N; the sampling noise of the paired difference shrinks
  // like 1/sqrt(N*paths), so the decrease is asserted with a 3-SE allowance.
  double prev_gap = std::numeric_limits<double>::infinity();
  double prev_se = 0.0;
  double last_gap = 0.0;
  for (std::int64_t steps : {100, 1000, 10000}) {
    SimConfig cfg = cpmm_config(0.2, steps, 500, 2.0);
    const std::vector<PathResult> results = lvrlab::run_paths(cfg);
    std::vector<double> diff(results.size()), base(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
      diff[i] = results[i].quad_variation_cost - results[i].cost_rate_integral;
      base[i] = results[i].cost_rate_integral;
    }
    const auto d = lvrlab::mean_std_error(diff);
    const auto b = lvrlab::mean_std_error(base);
    const double gap = std::abs(d.mean) / b.mean;
    const double se = d.se / b.mean;
    CAPTURE(steps, gap, se);
    CHECK(gap < prev_gap + 3.0 * (se + prev_se));
    prev_gap = gap;
    prev_se = se;
    last_gap = gap;
  }
  CHECK(last_gap < 0.02);
}

TEST_CASE("convention gap converges to the quadratic covariation, not to zero") {
  // The per-step gap (q_new - q_prev) * dx sums to the bracket of x(Q) and Q,
  // a strictly positive O(1) quantity: twice the frictionless rate integral.
  const double target = 2.0 * lvrlab::expected_lvr_cpmm(
                                  0.2, 1.0, 1.0, 1.0, std::numeric_limits<double>::infinity());
  std::vector<double> ns, gaps;
  for (std::int64_t steps : {100, 1000, 10000}) {
    SimConfig cfg = cpmm_config(0.2, steps, 500, 2.0);
    const ExperimentSummary s = lvrlab::run_experiment(cfg);
    ns.push_back(static_cast<double>(steps));
    gaps.push_back(s.convention_gap.mean);
    if (steps == 10000) {
      CAPTURE(s.convention_gap.mean, s.convention_gap.se, target);
      CHECK(std::abs(s.convention_gap.mean - target) <= 3.0 * s.convention_gap.se);
    }
  }
  const lvrlab::LineFit fit = lvrlab::loglog_fit(ns, gaps);
  CAPTURE(fit.slope);
  CHECK(std::abs(fit.slope) < 0.05);  // flat in N: the gap does not vanish
}

TEST_CASE("experiment validation rejects bad path counts") {
  SimConfig cfg = cpmm_config(0.2, 10, 1, 2.0);
  cfg.paths = 0;
  CHECK_THROWS_AS(lvrlab::run_experiment(cfg), lvrlab::ConfigError);
}

TEST_CASE("thread count resolution prefers the explicit request, then the env") {
  ::setenv("LVRLAB_THREADS", "3", 1);
  CHECK(lvrlab::resolve_thread_count(2) == 2);
  CHECK(lvrlab::resolve_thread_count(0) == 3);
  ::unsetenv("LVRLAB_THREADS");
  CHECK(lvrlab::resolve_thread_count(0) >= 1);
}

TEST_CASE("convergence study fits the sqrt(N) growth of constant-marginal cost") {
  SimConfig cfg = cpmm_config(0.2, 100, 200, std::numeric_limits<double>::infinity());
  cfg.cost = lvrlab::PiecewiseCostConfig{0.01, 1.0, 1.0};
  const std::vector<std::int64_t> steps{100, 1000, 10000};
  const lvrlab::ConvergenceStudy study = lvrlab::run_convergence(cfg, steps);
  REQUIRE(study.rows.size() == 3);
  CAPTURE(study.cost_total_fit.slope);
  CHECK(std::abs(study.cost_total_fit.slope - 0.5) <= 0.05);
  CHECK(std::abs(study.abs_variation_fit.slope - 0.5) <= 0.05);
  // with quadratic-variation pricing the same sweep's cost mean stays flat
  CHECK(study.rows[0].summary.cost_total.mean > 0.0);
}

TEST_CASE("convergence study requires at least two step counts") {
  SimConfig cfg = cpmm_config(0.2, 100, 10, 2.0);
  const std::vector<std::int64_t> steps{100};
  CHECK_THROWS_AS(lvrlab::run_convergence(cfg, steps), lvrlab::ConfigError);
}

TEST_CASE("value-normalized gain matches the closed-form rate per unit value") {
  SimConfig cfg = cpmm_config(0.2, 500, 2000, 2.0);
  const std::vector<PathResult> results = lvrlab::run_paths(cfg);
  std::vector<double> gains(results.size()), values(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    gains[i] = results[i].arb_gain;
    values[i] = results[i].value_time_integral;
  }
  const auto stat = lvrlab::ratio_of_means(gains, values);
  const double theory = lvrlab::normalized_lvr(0.2, 2.0);  // sigma^2/8 * (1 - 1/2)
  CAPTURE(stat.mean, stat.se, theory);
  CHECK(std::abs(stat.mean - theory) <= 3.0 * stat.se);
}
