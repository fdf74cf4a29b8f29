#include "jamguard/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace jamguard {

namespace {

LogLevel parse_level(const char* text) {
    if (!text) return LogLevel::Warn;
    const std::string s(text);
    if (s == "quiet" || s == "0") return LogLevel::Quiet;
    if (s == "error" || s == "1") return LogLevel::Error;
    if (s == "warn" || s == "2") return LogLevel::Warn;
    if (s == "info" || s == "3") return LogLevel::Info;
    if (s == "debug" || s == "4") return LogLevel::Debug;
    return LogLevel::Warn;
}

std::atomic<int>& level_slot() {
    static std::atomic<int> level{static_cast<int>(parse_level(std::getenv("JAMGUARD_LOG")))};
    return level;
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(level_slot().load()); }
void set_log_level(LogLevel level) { level_slot().store(static_cast<int>(level)); }

void log(LogLevel level, std::string_view message) {
    if (level == LogLevel::Quiet || static_cast<int>(level) > level_slot().load()) return;
    static std::mutex mu;
    static const char* names[] = {"", "error", "warn", "info", "debug"};
    std::lock_guard lock(mu);
    std::cerr << "[jamguard " << names[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace jamguard
