#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace peertruth {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3 };

// Level comes from PTE_LOG_LEVEL (debug|info|warn|error); defaults to warn.
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("PTE_LOG_LEVEL");
        if (env == nullptr) return LogLevel::warn;
        const std::string_view v(env);
        if (v == "debug") return LogLevel::debug;
        if (v == "info") return LogLevel::info;
        if (v == "error") return LogLevel::error;
        return LogLevel::warn;
    }();
    return level;
}

inline void log_at(LogLevel level, const char* tag, const std::string& message) {
    if (level < log_level()) return;
    std::cerr << "[peertruth:" << tag << "] " << message << '\n';
}

inline void log_debug(const std::string& message) { log_at(LogLevel::debug, "debug", message); }
inline void log_info(const std::string& message) { log_at(LogLevel::info, "info", message); }
inline void log_warn(const std::string& message) { log_at(LogLevel::warn, "warn", message); }
inline void log_error(const std::string& message) { log_at(LogLevel::error, "error", message); }

}  // namespace peertruth
