#include "hpsplines/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace hpsplines {

namespace {

int resolve_level() {
  const char* env = std::getenv("HPSPLINES_LOG");
  if (env == nullptr) return static_cast<int>(LogLevel::Warn);
  const std::string v(env);
  if (v == "error" || v == "0") return 0;
  if (v == "warn" || v == "1") return 1;
  if (v == "info" || v == "2") return 2;
  if (v == "debug" || v == "3") return 3;
  return static_cast<int>(LogLevel::Warn);
}

int current_level() {
  static const int level = resolve_level();
  return level;
}

const char* level_tag(LogLevel level) {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
  }
  return "?";
}

}  // namespace

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= current_level();
}

void log(LogLevel level, const std::string& message) {
  if (!log_enabled(level)) return;
  std::fprintf(stderr, "[hpsplines:%s] %s\n", level_tag(level), message.c_str());
}

}  // namespace hpsplines
