// SPDX-License-Identifier: Apache-2.0
#include "tron/log.hpp"

#include <iostream>
#include <mutex>

namespace tron {

namespace {

void stderr_sink(LogLevel level, const std::string& message) {
  std::cerr << (level == LogLevel::warning ? "[warn] " : "[info] ") << message << '\n';
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& current_sink() {
  static LogSink sink = stderr_sink;
  return sink;
}

void emit(LogLevel level, const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(level, message);
}

}  // namespace

LogSink set_log_sink(LogSink sink) {
  std::lock_guard lock(sink_mutex());
  LogSink previous = std::move(current_sink());
  current_sink() = sink ? std::move(sink) : LogSink(stderr_sink);
  return previous;
}

void log_info(const std::string& message) { emit(LogLevel::info, message); }
void log_warning(const std::string& message) { emit(LogLevel::warning, message); }

}  // namespace tron
