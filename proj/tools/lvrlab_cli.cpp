// Command-line front end: run one experiment (simulate), sweep step counts
// (converge), or estimate order-book depth slopes (depth). All numeric output
// goes to CSV files; every run writes a manifest that reproduces it.

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lvrlab/lvrlab.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_config = 2;

struct CommonFlags {
  std::string config_path;
  std::string out_dir = "lvrlab-out";
  std::optional<double> q0, sigma, horizon;
  std::optional<std::int64_t> steps, paths;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> illiquid, liquid, cost, convention;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file (a run manifest works too)");
  cmd->add_option("--out", f.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--q0", f.q0, "Initial price (> 0)");
  cmd->add_option("--sigma", f.sigma, "Volatility per sqrt(time unit) (>= 0)");
  cmd->add_option("--horizon", f.horizon, "Time horizon T (> 0)");
  cmd->add_option("--steps", f.steps, "Grid steps N (>= 1)");
  cmd->add_option("--paths", f.paths, "Monte-Carlo paths (>= 1)");
  cmd->add_option("--seed", f.seed, "Master seed (64-bit)");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = LVRLAB_THREADS env or hardware)");
  cmd->add_option("--illiquid", f.illiquid, "Pool curve: cpmm:<K> or tabulated:<file.csv>");
  cmd->add_option("--liquid", f.liquid,
                  "Hedge venue: cpmm:<K>, tabulated:<file.csv>, fixed:<slope> or perfect");
  cmd->add_option("--cost", f.cost,
                  "Cost model: quadratic or piecewise:c=<c>,alpha=<a>,slope=<s>");
  cmd->add_option("--convention", f.convention, "Execution price: new_price or previous_price");
}

std::pair<std::string, std::string> split_spec(const std::string& s) {
  const auto pos = s.find(':');
  if (pos == std::string::npos) return {s, ""};
  return {s.substr(0, pos), s.substr(pos + 1)};
}

double parse_spec_number(const std::string& text, const char* field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw lvrlab::ConfigError(field, "cannot parse number from '" + text + "'");
  }
}

lvrlab::IlliquidConfig parse_illiquid_spec(const std::string& s) {
  const auto [kind, arg] = split_spec(s);
  if (kind == "cpmm") return lvrlab::CpmmConfig{parse_spec_number(arg, "illiquid")};
  if (kind == "tabulated") return lvrlab::TabulatedConfig{arg};
  throw lvrlab::ConfigError("illiquid", "unknown curve kind '" + kind + "'");
}

lvrlab::LiquidConfig parse_liquid_spec(const std::string& s) {
  const auto [kind, arg] = split_spec(s);
  if (kind == "cpmm") return lvrlab::CpmmConfig{parse_spec_number(arg, "liquid")};
  if (kind == "tabulated") return lvrlab::TabulatedConfig{arg};
  if (kind == "fixed") return lvrlab::FixedSlopeConfig{parse_spec_number(arg, "liquid")};
  if (kind == "perfect") return lvrlab::PerfectLiquidityConfig{};
  throw lvrlab::ConfigError("liquid", "unknown venue kind '" + kind + "'");
}

lvrlab::CostConfig parse_cost_spec(const std::string& s) {
  const auto [kind, arg] = split_spec(s);
  if (kind == "quadratic") return lvrlab::QuadraticCostConfig{};
  if (kind != "piecewise") throw lvrlab::ConfigError("cost", "unknown cost kind '" + kind + "'");
  lvrlab::PiecewiseCostConfig p;
  if (!arg.empty()) {
    for (const auto& item : lvrlab::detail::split(arg, ',')) {
      const auto kv = lvrlab::detail::split(item, '=');
      if (kv.size() != 2) {
        throw lvrlab::ConfigError("cost", "expected key=value, got '" + std::string(item) + "'");
      }
      const std::string key(lvrlab::detail::trim(kv[0]));
      const double value = parse_spec_number(std::string(kv[1]), "cost");
      if (key == "c") {
        p.c = value;
      } else if (key == "alpha") {
        p.alpha = value;
      } else if (key == "slope") {
        p.slope_magnitude = value;
      } else {
        throw lvrlab::ConfigError("cost", "unknown parameter '" + key + "'");
      }
    }
  }
  return p;
}

lvrlab::SimConfig build_config(const CommonFlags& f) {
  lvrlab::SimConfig cfg;
  if (!f.config_path.empty()) cfg = lvrlab::load_config_file(f.config_path);
  if (f.q0) cfg.gbm.q0 = *f.q0;
  if (f.sigma) cfg.gbm.sigma = *f.sigma;
  if (f.horizon) cfg.gbm.horizon = *f.horizon;
  if (f.steps) cfg.gbm.steps = *f.steps;
  if (f.paths) cfg.paths = *f.paths;
  if (f.seed) cfg.master_seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  if (f.illiquid) cfg.illiquid = parse_illiquid_spec(*f.illiquid);
  if (f.liquid) cfg.liquid = parse_liquid_spec(*f.liquid);
  if (f.cost) cfg.cost = parse_cost_spec(*f.cost);
  if (f.convention) cfg.convention = lvrlab::convention_from_string(*f.convention);
  cfg.validate();
  return cfg;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_file(const fs::path& dir, const std::string& name, const std::string& content,
                std::vector<std::string>& outputs) {
  lvrlab::write_text_file(dir / name, content);
  outputs.push_back(name);
}

int cmd_simulate(const CommonFlags& flags, std::int64_t dump_paths) {
  const lvrlab::SimConfig cfg = build_config(flags);
  const fs::path out_dir(flags.out_dir);
  fs::create_directories(out_dir);

  Stopwatch clock;
  const std::vector<lvrlab::PathResult> results = lvrlab::run_paths(cfg);
  const lvrlab::ExperimentSummary summary =
      lvrlab::summarize_experiment(results, cfg.gbm.steps, cfg.master_seed);

  std::vector<std::string> outputs;
  {
    std::ostringstream csv;
    lvrlab::write_summary_csv(csv, summary);
    write_file(out_dir, "summary.csv", csv.str(), outputs);
  }
  if (const auto r = lvrlab::relative_liquidity_of(cfg)) {
    std::ostringstream csv;
    lvrlab::write_normalized_csv(csv, cfg, results, *r);
    write_file(out_dir, "normalized.csv", csv.str(), outputs);
  }
  if (dump_paths > 0) {
    fs::create_directories(out_dir / "paths");
    const std::int64_t count = std::min(dump_paths, cfg.paths);
    for (std::int64_t i = 0; i < count; ++i) {
      const lvrlab::PricePath path =
          lvrlab::sample_path(cfg.gbm, lvrlab::derive_seed(cfg.master_seed, i));
      std::ostringstream csv;
      lvrlab::write_path_csv(csv, path);
      char name[48];
      std::snprintf(name, sizeof(name), "paths/path_%05lld.csv", static_cast<long long>(i));
      write_file(out_dir, name, csv.str(), outputs);
    }
  }

  const nlohmann::json manifest = lvrlab::make_manifest("simulate", cfg, clock.seconds(), outputs);
  lvrlab::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  std::cout << "simulate: " << cfg.paths << " paths x " << cfg.gbm.steps << " steps, seed "
            << cfg.master_seed << "\n";
  std::cout << "  arb_gain mean " << lvrlab::format_double(summary.arb_gain.mean) << " (se "
            << lvrlab::format_double(summary.arb_gain.se) << ")\n";
  for (const auto& name : outputs) std::cout << "  wrote " << (out_dir / name).string() << "\n";
  std::cout << "  wrote " << (out_dir / "manifest.json").string() << "\n";
  return exit_ok;
}

int cmd_converge(const CommonFlags& flags, std::vector<std::int64_t> steps_list) {
  const lvrlab::SimConfig cfg = build_config(flags);
  if (steps_list.size() < 2) throw lvrlab::ConfigError("steps-list", "needs at least 2 step counts");
  const fs::path out_dir(flags.out_dir);
  fs::create_directories(out_dir);

  Stopwatch clock;
  const lvrlab::ConvergenceStudy study = lvrlab::run_convergence(cfg, steps_list);

  std::vector<std::string> outputs;
  {
    std::ostringstream csv;
    lvrlab::write_convergence_csv(csv, study);
    write_file(out_dir, "convergence.csv", csv.str(), outputs);
  }
  {
    std::ostringstream csv;
    lvrlab::write_fits_csv(csv, study);
    write_file(out_dir, "fits.csv", csv.str(), outputs);
  }

  nlohmann::json manifest = lvrlab::make_manifest("converge", cfg, clock.seconds(), outputs);
  manifest["steps_list"] = steps_list;
  lvrlab::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  std::cout << "converge: " << steps_list.size() << " step counts, " << cfg.paths
            << " paths each\n";
  std::cout << "  abs_variation log-log slope "
            << lvrlab::format_double(study.abs_variation_fit.slope) << "\n";
  std::cout << "  cost_total log-log slope "
            << lvrlab::format_double(study.cost_total_fit.slope) << "\n";
  for (const auto& name : outputs) std::cout << "  wrote " << (out_dir / name).string() << "\n";
  std::cout << "  wrote " << (out_dir / "manifest.json").string() << "\n";
  return exit_ok;
}

int cmd_depth(const std::vector<std::string>& files, double window_bps) {
  std::size_t ok = 0;
  std::vector<std::string> errors;
  lvrlab::write_depth_report_header(std::cout);
  for (const auto& file : files) {
    try {
      std::ifstream in(file);
      if (!in) throw lvrlab::ValidationError("cannot open file");
      lvrlab::DepthSnapshot snap = lvrlab::parse_snapshot(in);
      snap.timestamp = file;
      const lvrlab::SlopeEstimate est = lvrlab::estimate_slope(snap, window_bps);
      lvrlab::write_depth_report_row(std::cout, est);
      ++ok;
    } catch (const std::exception& e) {
      errors.push_back(file + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::cerr << "errors:\n";
    for (const auto& e : errors) std::cerr << "  " << e << "\n";
  }
  return ok > 0 ? exit_ok : exit_runtime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arbitrage and rebalancing-shortfall lab for two imperfectly liquid venues"};
  app.set_version_flag("--version", std::string(lvrlab::tool_name) + " " + lvrlab::tool_version);
  app.require_subcommand(1);

  CommonFlags sim_flags;
  std::int64_t dump_paths = 0;
  CLI::App* simulate = app.add_subcommand("simulate", "Run one Monte-Carlo experiment");
  add_common_flags(simulate, sim_flags);
  simulate->add_option("--dump-paths", dump_paths, "Also write the first N price paths as CSV");

  CommonFlags conv_flags;
  std::vector<std::int64_t> steps_list{100, 1000, 10000};
  CLI::App* converge = app.add_subcommand("converge", "Sweep step counts and fit growth exponents");
  add_common_flags(converge, conv_flags);
  converge->add_option("--steps-list", steps_list, "Step counts to sweep (at least 2)")
      ->delimiter(',')
      ->capture_default_str();

  std::vector<std::string> depth_files;
  double window_bps = 50.0;
  CLI::App* depth = app.add_subcommand("depth", "Estimate marginal depth from order-book snapshots");
  depth->add_option("files", depth_files, "Snapshot CSV files")->required();
  depth->add_option("--window-bps", window_bps, "Regression half-window around mid, in bps")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim_flags, dump_paths);
    if (converge->parsed()) return cmd_converge(conv_flags, steps_list);
    return cmd_depth(depth_files, window_bps);
  } catch (const lvrlab::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_runtime;
  }
}
