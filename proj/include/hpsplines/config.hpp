/// @file config.hpp
/// @brief JSON run configuration: parsing, validation, serialization.
#pragma once

#include <string>

#include <json.hpp>

#include "hpsplines/optimizer.hpp"
#include "hpsplines/problem.hpp"

namespace hpsplines {

/// Which artifacts a run writes and where.
struct OutputSpec {
  std::string directory = "out";
  bool path_csv = true;
  bool momentum_csv = true;
  bool summary_json = true;
  bool convergence_csv = true;
};

struct RunConfig {
  ProblemSpec problem;
  OptimizerConfig optimizer;
  OutputSpec outputs;
};

/// Parses and validates a configuration object.  Unknown keys anywhere in the
/// document are rejected.  Throws ConfigError with a key path on any problem.
RunConfig parse_config(const nlohmann::json& root);

/// Reads, parses, and validates a configuration file.
RunConfig load_config(const std::string& path);

/// Serializes a configuration back to JSON (round-trips through
/// parse_config).
nlohmann::json serialize_config(const RunConfig& config);

}  // namespace hpsplines
