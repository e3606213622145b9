#include "delaylab/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace delaylab {

namespace {

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

void emit(std::string_view tag, std::string_view message) {
  std::lock_guard lock(log_mutex());
  std::cerr << "[delaylab " << tag << "] " << message << '\n';
}

}  // namespace

LogLevel log_level() {
  const char* env = std::getenv("DELAYLAB_LOG");
  if (env == nullptr) return LogLevel::info;
  const std::string v(env);
  if (v == "quiet") return LogLevel::quiet;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::info;
}

void log_warning(std::string_view message) {
  if (log_level() != LogLevel::quiet) emit("warning", message);
}

void log_info(std::string_view message) {
  if (log_level() >= LogLevel::info) emit("info", message);
}

void log_debug(std::string_view message) {
  if (log_level() >= LogLevel::debug) emit("debug", message);
}

}  // namespace delaylab
