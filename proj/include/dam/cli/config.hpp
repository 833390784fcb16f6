#pragma once

// Run configuration for damctl. Two encodings are read:
//
//   # comment
//   [process]
//   mu = 2
//   sigma2 = 1
//   [cost]
//   g = piecewise 0:0 3:0.5 6:4
//
// and a JSON object with the same sections. Unknown sections and keys are
// rejected; every error names the line (or JSON path) it came from.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "dam/cost_model.hpp"
#include "dam/ig.hpp"
#include "dam/optimizer.hpp"
#include "dam/passage.hpp"
#include "dam/simulator.hpp"

namespace dam::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StationaryOptions {
  int points = 200;
  double z_max = 0.0;  // 0: chosen from the policy
  bool simulate = true;
};

struct RunConfig {
  IGParams process{2.0, 1.0};
  Policy policy{3.0, 1.0, 1.0};
  std::optional<double> start;  // evaluation start x; τ when absent
  CostParams cost;
  QuadConfig quadrature;
  SimConfig simulation;
  SearchSpec search;
  StationaryOptions stationary;
  std::string output_dir = "out";

  double start_level() const { return start.value_or(policy.tau); }
};

/// The benchmark parameter set.
RunConfig default_config();

/// Parses either encoding; `origin` prefixes error locations.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::string& path);

/// Round-trippable key = value rendering of a configuration.
std::string render_config(const RunConfig& cfg);

}  // namespace dam::cli
