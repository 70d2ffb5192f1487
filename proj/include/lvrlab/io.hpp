#pragma once
// Serialization: JSON experiment configs (and their echo in run manifests),
// CSV report writers, and the fixed-format number printing that keeps
// repeated runs byte-identical.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lvrlab/book_depth.hpp"
#include "lvrlab/experiment.hpp"
#include "lvrlab/version.hpp"

namespace lvrlab {

// Shortest round-trip representation; locale-independent.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline const char* to_string(ExecutionPriceConvention c) {
  return c == ExecutionPriceConvention::previous_price ? "previous_price" : "new_price";
}

inline ExecutionPriceConvention convention_from_string(const std::string& s) {
  if (s == "previous_price") return ExecutionPriceConvention::previous_price;
  if (s == "new_price") return ExecutionPriceConvention::new_price;
  throw ConfigError("convention", "must be 'new_price' or 'previous_price', got '" + s + "'");
}

// --- JSON config -----------------------------------------------------------

inline nlohmann::json to_json(const IlliquidConfig& cfg) {
  if (const auto* c = std::get_if<CpmmConfig>(&cfg)) {
    return {{"kind", "cpmm"}, {"k", c->invariant_root}};
  }
  return {{"kind", "tabulated"}, {"path", std::get<TabulatedConfig>(cfg).csv_path}};
}

inline nlohmann::json to_json(const LiquidConfig& cfg) {
  if (const auto* c = std::get_if<CpmmConfig>(&cfg)) {
    return {{"kind", "cpmm"}, {"k", c->invariant_root}};
  }
  if (const auto* t = std::get_if<TabulatedConfig>(&cfg)) {
    return {{"kind", "tabulated"}, {"path", t->csv_path}};
  }
  if (const auto* f = std::get_if<FixedSlopeConfig>(&cfg)) {
    return {{"kind", "fixed_slope"}, {"slope", f->slope_magnitude}};
  }
  return {{"kind", "perfect"}};
}

inline nlohmann::json to_json(const CostConfig& cfg) {
  if (std::holds_alternative<QuadraticCostConfig>(cfg)) return {{"kind", "quadratic"}};
  const auto& p = std::get<PiecewiseCostConfig>(cfg);
  return {{"kind", "piecewise"}, {"c", p.c}, {"alpha", p.alpha}, {"slope", p.slope_magnitude}};
}

inline nlohmann::json to_json(const SimConfig& cfg) {
  return {{"gbm",
           {{"q0", cfg.gbm.q0},
            {"sigma", cfg.gbm.sigma},
            {"horizon", cfg.gbm.horizon},
            {"steps", cfg.gbm.steps}}},
          {"illiquid", to_json(cfg.illiquid)},
          {"liquid", to_json(cfg.liquid)},
          {"cost", to_json(cfg.cost)},
          {"convention", to_string(cfg.convention)},
          {"paths", cfg.paths},
          {"master_seed", cfg.master_seed},
          {"threads", cfg.threads}};
}

namespace detail {

template <class T>
T get_field(const nlohmann::json& j, const char* key, const T& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + key, "has the wrong type");
  }
}

inline IlliquidConfig illiquid_from_json(const nlohmann::json& j) {
  const auto kind = get_field<std::string>(j, "kind", "cpmm", "illiquid.");
  if (kind == "cpmm") return CpmmConfig{get_field(j, "k", 1.0, "illiquid.")};
  if (kind == "tabulated") return TabulatedConfig{get_field<std::string>(j, "path", "", "illiquid.")};
  throw ConfigError("illiquid.kind", "must be 'cpmm' or 'tabulated', got '" + kind + "'");
}

inline LiquidConfig liquid_from_json(const nlohmann::json& j) {
  const auto kind = get_field<std::string>(j, "kind", "perfect", "liquid.");
  if (kind == "cpmm") return CpmmConfig{get_field(j, "k", 1.0, "liquid.")};
  if (kind == "tabulated") return TabulatedConfig{get_field<std::string>(j, "path", "", "liquid.")};
  if (kind == "fixed_slope") return FixedSlopeConfig{get_field(j, "slope", 1.0, "liquid.")};
  if (kind == "perfect") return PerfectLiquidityConfig{};
  throw ConfigError("liquid.kind",
                    "must be 'cpmm', 'tabulated', 'fixed_slope' or 'perfect', got '" + kind + "'");
}

inline CostConfig cost_from_json(const nlohmann::json& j) {
  const auto kind = get_field<std::string>(j, "kind", "quadratic", "cost.");
  if (kind == "quadratic") return QuadraticCostConfig{};
  if (kind == "piecewise") {
    return PiecewiseCostConfig{get_field(j, "c", 0.01, "cost."), get_field(j, "alpha", 1.0, "cost."),
                               get_field(j, "slope", 1.0, "cost.")};
  }
  throw ConfigError("cost.kind", "must be 'quadratic' or 'piecewise', got '" + kind + "'");
}

}  // namespace detail

inline SimConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");
  SimConfig cfg;
  if (j.contains("gbm")) {
    const auto& g = j.at("gbm");
    cfg.gbm.q0 = detail::get_field(g, "q0", cfg.gbm.q0, "gbm.");
    cfg.gbm.sigma = detail::get_field(g, "sigma", cfg.gbm.sigma, "gbm.");
    cfg.gbm.horizon = detail::get_field(g, "horizon", cfg.gbm.horizon, "gbm.");
    cfg.gbm.steps = detail::get_field(g, "steps", cfg.gbm.steps, "gbm.");
  }
  if (j.contains("illiquid")) cfg.illiquid = detail::illiquid_from_json(j.at("illiquid"));
  if (j.contains("liquid")) cfg.liquid = detail::liquid_from_json(j.at("liquid"));
  if (j.contains("cost")) cfg.cost = detail::cost_from_json(j.at("cost"));
  if (j.contains("convention")) {
    cfg.convention = convention_from_string(detail::get_field<std::string>(j, "convention", "new_price", ""));
  }
  cfg.paths = detail::get_field(j, "paths", cfg.paths, "");
  cfg.master_seed = detail::get_field(j, "master_seed", cfg.master_seed, "");
  cfg.threads = detail::get_field(j, "threads", cfg.threads, "");
  return cfg;
}

// Reads a config file. A run manifest is accepted too: its "config" object
// is used, so a finished run can be replayed directly.
inline SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", "invalid JSON in '" + path + "': " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.at("config").is_object()) {
    return config_from_json(j.at("config"));
  }
  return config_from_json(j);
}

// --- reports ---------------------------------------------------------------

inline void write_summary_csv(std::ostream& out, const ExperimentSummary& s) {
  out << "metric,mean,stderr,paths,steps\n";
  for (const auto& [name, metric] : s.rows()) {
    out << name << ',' << format_double(metric.mean) << ',' << format_double(metric.se) << ','
        << s.paths << ',' << s.steps << '\n';
  }
}

inline void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study) {
  out << "steps,arb_gain_mean,arb_gain_se,lvr_closed_mean,lvr_closed_se,gap,"
         "convention_gap_mean,convention_gap_se,abs_variation_mean,abs_variation_se,"
         "cost_total_mean,cost_total_se,quad_variation_cost_mean,quad_variation_cost_se,"
         "cost_rate_integral_mean,cost_rate_integral_se\n";
  for (const auto& row : study.rows) {
    const ExperimentSummary& s = row.summary;
    out << row.steps << ',' << format_double(s.arb_gain.mean) << ',' << format_double(s.arb_gain.se)
        << ',' << format_double(s.lvr_closed.mean) << ',' << format_double(s.lvr_closed.se) << ','
        << format_double(s.arb_gain.mean - s.lvr_closed.mean) << ','
        << format_double(s.convention_gap.mean) << ',' << format_double(s.convention_gap.se) << ','
        << format_double(s.abs_variation.mean) << ',' << format_double(s.abs_variation.se) << ','
        << format_double(s.cost_total.mean) << ',' << format_double(s.cost_total.se) << ','
        << format_double(s.quad_variation_cost.mean) << ','
        << format_double(s.quad_variation_cost.se) << ','
        << format_double(s.cost_rate_integral.mean) << ','
        << format_double(s.cost_rate_integral.se) << '\n';
  }
}

inline void write_fits_csv(std::ostream& out, const ConvergenceStudy& study) {
  out << "quantity,loglog_slope,loglog_intercept,r2\n";
  const auto row = [&](const char* name, const LineFit& f) {
    out << name << ',' << format_double(f.slope) << ',' << format_double(f.intercept) << ','
        << format_double(f.r2) << '\n';
  };
  row("convention_gap", study.convention_gap_fit);
  row("abs_variation", study.abs_variation_fit);
  row("cost_total", study.cost_total_fit);
}

// Value-normalized rate: theory sigma^2/8 * (1 - 1/r) against the
// ratio-of-means Monte-Carlo estimate arb_gain / integral of pool value.
inline void write_normalized_csv(std::ostream& out, const SimConfig& cfg,
                                 const std::vector<PathResult>& results, double r) {
  std::vector<double> gains(results.size()), values(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    gains[i] = results[i].arb_gain;
    values[i] = results[i].value_time_integral;
  }
  const MeanStdError mc = ratio_of_means(gains, values);
  out << "sigma,r,ell_over_V_theory,ell_over_V_mc,stderr\n";
  out << format_double(cfg.gbm.sigma) << ',' << format_double(r) << ','
      << format_double(normalized_lvr(cfg.gbm.sigma, r)) << ',' << format_double(mc.mean) << ','
      << format_double(mc.se) << '\n';
}

inline void write_depth_report_header(std::ostream& out) {
  out << "mid,slope,r2,n_levels,window_bps\n";
}

inline void write_depth_report_row(std::ostream& out, const SlopeEstimate& est) {
  out << format_double(est.mid) << ',' << format_double(est.slope_magnitude) << ','
      << format_double(est.r2) << ',' << est.n_levels << ',' << format_double(est.window_bps)
      << '\n';
}

inline void write_path_csv(std::ostream& out, const PricePath& path) {
  out << "t,Q\n";
  for (std::size_t i = 0; i < path.price.size(); ++i) {
    out << format_double(path.time[i]) << ',' << format_double(path.price[i]) << '\n';
  }
}

// --- run manifest ------------------------------------------------------------

inline nlohmann::json make_manifest(const std::string& command, const SimConfig& cfg,
                                    double duration_seconds,
                                    const std::vector<std::string>& outputs) {
  return {{"tool", tool_name},
          {"version", tool_version},
          {"command", command},
          {"config", to_json(cfg)},
          {"master_seed", cfg.master_seed},
          {"duration_seconds", duration_seconds},
          {"outputs", outputs}};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace lvrlab
