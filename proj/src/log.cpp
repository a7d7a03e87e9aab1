#include "memograph/log.hpp"

#include <iostream>
#include <mutex>

namespace memograph {

namespace {

std::mutex g_log_mutex;
LogSink g_sink;

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::kInfo:
      return "info";
    case LogLevel::kWarning:
      return "warning";
    case LogLevel::kError:
      return "error";
  }
  return "?";
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(g_log_mutex);
  g_sink = std::move(sink);
}

void log(LogLevel level, const std::string& message) {
  std::lock_guard lock(g_log_mutex);
  if (g_sink) {
    g_sink(level, message);
    return;
  }
  std::cerr << "[memograph " << level_name(level) << "] " << message << '\n';
}

}  // namespace memograph
