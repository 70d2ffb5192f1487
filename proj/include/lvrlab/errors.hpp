#pragma once
// Error taxonomy shared across the library. Every failure mode callers may
// want to branch on gets its own type; everything derives from std::runtime_error
// (or std::domain_error for out-of-domain prices) so generic handlers still work.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace lvrlab {

// A price outside a curve's stated domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A cost model asked to divide by a non-positive marginal liquidity.
struct DegenerateLiquidityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A trade that would drain a pool's reserves.
struct ReserveExhaustionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Not enough order-book levels inside the regression window.
struct InsufficientLevelsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All regression abscissae coincide; the fit is undefined.
struct ZeroVarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text. Carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Structurally valid input that violates a stated invariant.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An invalid configuration value. Carries the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error("config error: " + field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// One or more simulation paths failed; message aggregates the diagnostics.
struct ExperimentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lvrlab
