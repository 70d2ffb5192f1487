#pragma once
// Runtime experiment description and dispatch into the templated engine.
// A SimConfig is plain data (loadable from JSON, overridable from flags);
// run_experiment materializes the configured curve/venue/cost combination
// and hands it to the core.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lvrlab/arb_engine.hpp"
#include "lvrlab/cost_models.hpp"
#include "lvrlab/curves.hpp"
#include "lvrlab/errors.hpp"
#include "lvrlab/numeric.hpp"
#include "lvrlab/price_dynamics.hpp"

namespace lvrlab {

struct CpmmConfig {
  double invariant_root = 1.0;
};

struct TabulatedConfig {
  std::string csv_path;
};

struct FixedSlopeConfig {
  double slope_magnitude = 1.0;
};

struct PerfectLiquidityConfig {};

using IlliquidConfig = std::variant<CpmmConfig, TabulatedConfig>;
using LiquidConfig = std::variant<CpmmConfig, TabulatedConfig, FixedSlopeConfig, PerfectLiquidityConfig>;

struct QuadraticCostConfig {};

struct PiecewiseCostConfig {
  double c = 0.01;
  double alpha = 1.0;
  double slope_magnitude = 1.0;
};

using CostConfig = std::variant<QuadraticCostConfig, PiecewiseCostConfig>;

struct SimConfig {
  GbmSpec gbm;
  IlliquidConfig illiquid = CpmmConfig{};
  LiquidConfig liquid = PerfectLiquidityConfig{};
  CostConfig cost = QuadraticCostConfig{};
  ExecutionPriceConvention convention = ExecutionPriceConvention::new_price;
  std::int64_t paths = 1000;
  std::uint64_t master_seed = 42;
  int threads = 0;  // 0 = LVRLAB_THREADS env or hardware count

  void validate() const {
    gbm.validate();
    if (paths < 1) throw ConfigError("paths", "must be at least 1");
    if (const auto* c = std::get_if<CpmmConfig>(&illiquid)) {
      if (!(std::isfinite(c->invariant_root) && c->invariant_root > 0.0)) {
        throw ConfigError("illiquid.k", "must be positive and finite");
      }
    }
    if (const auto* t = std::get_if<TabulatedConfig>(&illiquid)) {
      if (t->csv_path.empty()) throw ConfigError("illiquid.path", "must name a CSV file");
    }
    if (const auto* c = std::get_if<CpmmConfig>(&liquid)) {
      if (!(std::isfinite(c->invariant_root) && c->invariant_root > 0.0)) {
        throw ConfigError("liquid.k", "must be positive and finite");
      }
    }
    if (const auto* t = std::get_if<TabulatedConfig>(&liquid)) {
      if (t->csv_path.empty()) throw ConfigError("liquid.path", "must name a CSV file");
    }
    if (const auto* f = std::get_if<FixedSlopeConfig>(&liquid)) {
      if (!(std::isfinite(f->slope_magnitude) && f->slope_magnitude > 0.0)) {
        throw ConfigError("liquid.slope", "must be positive and finite");
      }
    }
    if (const auto* p = std::get_if<PiecewiseCostConfig>(&cost)) {
      if (!(std::isfinite(p->c) && p->c > 0.0)) throw ConfigError("cost.c", "must be positive and finite");
      if (!(std::isfinite(p->alpha) && p->alpha > 0.0)) {
        throw ConfigError("cost.alpha", "must be positive and finite");
      }
      if (!(std::isfinite(p->slope_magnitude) && p->slope_magnitude > 0.0)) {
        throw ConfigError("cost.slope", "must be positive and finite");
      }
    }
  }
};

namespace detail {

using IlliquidCurve = std::variant<CpmmCurve, TabulatedCurve>;
using LiquidVenue = std::variant<CurveSlope<CpmmCurve>, CurveSlope<TabulatedCurve>, FixedSlope,
                                 PerfectlyLiquidVenue>;

// A bad or unreadable curve file is a configuration problem; surface it as
// ConfigError naming the field so callers map it to the usage exit code.
inline TabulatedCurve load_tabulated(const std::string& path, const char* field) {
  try {
    return TabulatedCurve::from_csv_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

inline IlliquidCurve materialize_illiquid(const IlliquidConfig& cfg) {
  if (const auto* c = std::get_if<CpmmConfig>(&cfg)) return CpmmCurve(c->invariant_root);
  return load_tabulated(std::get<TabulatedConfig>(cfg).csv_path, "illiquid.path");
}

inline LiquidVenue materialize_liquid(const LiquidConfig& cfg) {
  if (const auto* c = std::get_if<CpmmConfig>(&cfg)) {
    return CurveSlope<CpmmCurve>(CpmmCurve(c->invariant_root));
  }
  if (const auto* t = std::get_if<TabulatedConfig>(&cfg)) {
    return CurveSlope<TabulatedCurve>(load_tabulated(t->csv_path, "liquid.path"));
  }
  if (const auto* f = std::get_if<FixedSlopeConfig>(&cfg)) return FixedSlope(f->slope_magnitude);
  return PerfectlyLiquidVenue{};
}

}  // namespace detail

// Per-path results for the configured experiment, in path-index order.
inline std::vector<PathResult> run_paths(const SimConfig& config) {
  config.validate();
  const detail::IlliquidCurve illiquid = detail::materialize_illiquid(config.illiquid);
  const detail::LiquidVenue liquid = detail::materialize_liquid(config.liquid);

  return std::visit(
      [&](const auto& curve, const auto& venue) {
        if (std::holds_alternative<QuadraticCostConfig>(config.cost)) {
          const QuadraticCost cost(venue);
          return simulate_paths(config.gbm, curve, venue, cost, config.convention, config.paths,
                                config.master_seed, config.threads);
        }
        const auto& p = std::get<PiecewiseCostConfig>(config.cost);
        const PiecewiseMarginalCost cost(p.c, p.alpha, p.slope_magnitude);
        return simulate_paths(config.gbm, curve, venue, cost, config.convention, config.paths,
                              config.master_seed, config.threads);
      },
      illiquid, liquid);
}

inline ExperimentSummary run_experiment(const SimConfig& config) {
  return summarize_experiment(run_paths(config), config.gbm.steps, config.master_seed);
}

// Depth ratio of the two venues when it is price-independent: both venues
// constant-product (r = K_liquid / K_illiquid) or a frictionless hedge venue
// (r = inf). Otherwise empty.
inline std::optional<double> relative_liquidity_of(const SimConfig& config) {
  const auto* ill = std::get_if<CpmmConfig>(&config.illiquid);
  if (ill == nullptr) return std::nullopt;
  if (const auto* liq = std::get_if<CpmmConfig>(&config.liquid)) {
    return liq->invariant_root / ill->invariant_root;
  }
  if (std::holds_alternative<PerfectLiquidityConfig>(config.liquid)) {
    return std::numeric_limits<double>::infinity();
  }
  return std::nullopt;
}

struct ConvergenceRow {
  std::int64_t steps = 0;
  ExperimentSummary summary;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  LineFit convention_gap_fit;  // log mean gap vs log N
  LineFit abs_variation_fit;   // log mean sum|dx| vs log N
  LineFit cost_total_fit;      // log mean total cost vs log N
};

// Re-runs the configured experiment across step counts and fits log-log
// growth exponents of the diagnostics against N.
inline ConvergenceStudy run_convergence(const SimConfig& base,
                                        std::span<const std::int64_t> steps_list) {
  if (steps_list.size() < 2) throw ConfigError("steps_list", "needs at least 2 step counts");
  ConvergenceStudy study;
  std::vector<double> ns, gap_means, abs_means, cost_means;
  for (const std::int64_t n : steps_list) {
    SimConfig cfg = base;
    cfg.gbm.steps = n;
    ConvergenceRow row;
    row.steps = n;
    row.summary = run_experiment(cfg);
    ns.push_back(static_cast<double>(n));
    gap_means.push_back(std::abs(row.summary.convention_gap.mean));
    abs_means.push_back(row.summary.abs_variation.mean);
    cost_means.push_back(row.summary.cost_total.mean);
    study.rows.push_back(std::move(row));
  }
  study.convention_gap_fit = loglog_fit(ns, gap_means);
  study.abs_variation_fit = loglog_fit(ns, abs_means);
  study.cost_total_fit = loglog_fit(ns, cost_means);
  return study;
}

}  // namespace lvrlab
