/// @file log.hpp
/// @brief Minimal stderr logger controlled by the HPSPLINES_LOG environment
/// variable (error, warn, info, debug; default warn).
#pragma once

#include <string>

namespace hpsplines {

enum class LogLevel : int { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// True when `level` is enabled under the current HPSPLINES_LOG setting.
bool log_enabled(LogLevel level);

/// Writes one line to stderr when `level` is enabled.
void log(LogLevel level, const std::string& message);

}  // namespace hpsplines
