#pragma once

#include <functional>
#include <string>

namespace memograph {

enum class LogLevel { kInfo, kWarning, kError };

using LogSink = std::function<void(LogLevel, const std::string&)>;

// Process-wide sink; defaults to stderr. Passing nullptr restores the
// default.
void set_log_sink(LogSink sink);

void log(LogLevel level, const std::string& message);
inline void log_warning(const std::string& message) {
  log(LogLevel::kWarning, message);
}

}  // namespace memograph
