// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/common/log.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

namespace qfe {
namespace {

LogLevel level_from_env() {
  const char* v = std::getenv("QFE_LOG_LEVEL");
  if (!v) return LogLevel::kInfo;
  std::string s(v);
  if (s == "debug") return LogLevel::kDebug;
  if (s == "warn") return LogLevel::kWarn;
  if (s == "error") return LogLevel::kError;
  if (s == "off") return LogLevel::kOff;
  return LogLevel::kInfo;
}

std::atomic<LogLevel>& current() {
  static std::atomic<LogLevel> level{level_from_env()};
  return level;
}

const char* level_name(LogLevel l) {
  switch (l) {
    case LogLevel::kDebug: return "debug";
    case LogLevel::kInfo: return "info";
    case LogLevel::kWarn: return "warn";
    case LogLevel::kError: return "error";
    default: return "off";
  }
}

}  // namespace

void set_log_level(LogLevel level) { current() = level; }
LogLevel log_level() { return current(); }

void log_event(LogLevel level, std::string_view component, std::string_view event, const nlohmann::json& fields) {
  if (level < current() || level == LogLevel::kOff) return;
  nlohmann::json j = fields.is_object() ? fields : nlohmann::json{{"detail", fields}};
  j["ts"] = std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch()).count();
  j["level"] = level_name(level);
  j["component"] = component;
  j["event"] = event;
  std::string line = j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::fputs(line.c_str(), stderr);
}

}  // namespace qfe
