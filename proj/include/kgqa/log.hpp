#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace kgqa {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, quiet = 4 };

// Threshold comes from the KGQA_LOG environment variable
// (debug|info|warn|error|quiet); default info.
inline LogLevel log_threshold() {
  static LogLevel level = [] {
    const char* env = std::getenv("KGQA_LOG");
    if (env == nullptr) return LogLevel::info;
    std::string v(env);
    if (v == "debug") return LogLevel::debug;
    if (v == "info") return LogLevel::info;
    if (v == "warn") return LogLevel::warn;
    if (v == "error") return LogLevel::error;
    if (v == "quiet") return LogLevel::quiet;
    return LogLevel::info;
  }();
  return level;
}

inline void log_message(LogLevel level, const std::string& msg) {
  if (level < log_threshold()) return;
  const char* tag = "info";
  if (level == LogLevel::debug) tag = "debug";
  if (level == LogLevel::warn) tag = "warn";
  if (level == LogLevel::error) tag = "error";
  std::fprintf(stderr, "[kgqa:%s] %s\n", tag, msg.c_str());
}

inline void log_debug(const std::string& msg) { log_message(LogLevel::debug, msg); }
inline void log_info(const std::string& msg) { log_message(LogLevel::info, msg); }
inline void log_warn(const std::string& msg) { log_message(LogLevel::warn, msg); }
inline void log_error(const std::string& msg) { log_message(LogLevel::error, msg); }

}  // namespace kgqa
