#pragma once

#include "gmcflow/solver.hpp"
#include "gmcflow/weight.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gmcflow {

// Run configuration. File format: one "key = value" per line, '#' comments.
// CLI flags mirror the keys and override file values.
struct RunConfig {
  int dim = 2;
  int y_grid = 32;
  int z_grid = 16;
  double beta = 0.5;
  std::uint64_t seed = 1;
  int realizations = 2000;
  WeightMode weight_mode = WeightMode::kernel;
  double weight_floor = 0.0;
  double solver_tol = 1e-10;
  int solver_max_iter = 20000;
  int inversion_cutoff = 0;  // 0 = z-grid Nyquist
  int targets = 20;
  int workers = 0;           // 0 = hardware concurrency
  Transmissibility transmissibility = Transmissibility::geometric;
  std::string experiment = "run";
  std::string output_dir = "out";

  int effective_cutoff() const { return inversion_cutoff == 0 ? z_grid / 2 : inversion_cutoff; }
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;  // all violations, not just the first

  bool ok() const { return config.has_value(); }
};

// Key/value map -> validated config (collects every violation; unknown keys
// are rejected).
ParseResult validate_config(const std::map<std::string, std::string>& kv);

ParseResult parse_config(const std::string& path);

// Reads a config file (optional) and applies overrides on top.
ParseResult parse_config_with_overrides(const std::string& path,
                                        const std::map<std::string, std::string>& overrides);

std::string config_echo(const RunConfig& cfg);  // canonical key = value listing

}  // namespace gmcflow
