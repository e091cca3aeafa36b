// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Structured logging: one JSON object per line on standard error.

#pragma once

#include <string_view>

#include "json.hpp"

namespace qfe {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kOff = 4 };

// Initial level comes from QFE_LOG_LEVEL (debug|info|warn|error|off),
// default info.
void set_log_level(LogLevel level);
LogLevel log_level();

void log_event(LogLevel level, std::string_view component, std::string_view event,
               const nlohmann::json& fields = nlohmann::json::object());

}  // namespace qfe
