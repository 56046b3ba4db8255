/// @file artifacts.hpp
/// @brief Deterministic CSV/JSON artifact writers.
///
/// All floating-point values are written with 17 significant digits, so
/// identical runs produce byte-identical files.
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpsplines/config.hpp"
#include "hpsplines/continuous.hpp"
#include "hpsplines/integrator.hpp"
#include "hpsplines/optimizer.hpp"

namespace hpsplines {

/// Shortest-faithful decimal form of a double (17 significant digits).
std::string format_double(double value);

/// Per-step trajectory table: index, time, group entries, velocities,
/// momenta, conserved-momentum norm, node flag.  The final row has no inner
/// velocity and writes nan in the xi1 columns.
void write_path_csv(std::ostream& out, const ProblemSpec& problem, const DiscretePath& path);

/// Momentum diagnostics per index.
void write_momentum_csv(std::ostream& out, const std::vector<MomentumRow>& rows);

/// Run summary as JSON.
nlohmann::json summary_json(const ProblemSpec& problem, const OptimResult& result);

/// Convergence study table (h, error) plus a JSON summary with the fitted
/// order.
void write_convergence_csv(std::ostream& out, const ConvergenceStudy& study);
nlohmann::json convergence_json(const ConvergenceStudy& study);

/// Creates the directory (if needed) and writes content to directory/name.
/// Throws ConfigError when the location is not writable.
void write_file(const std::string& directory, const std::string& name,
                const std::string& content);

}  // namespace hpsplines
