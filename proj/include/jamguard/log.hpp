#pragma once

#include <string_view>

namespace jamguard {

enum class LogLevel { Quiet = 0, Error, Warn, Info, Debug };

/// Level from JAMGUARD_LOG (quiet|error|warn|info|debug, or 0-4); warn when unset.
LogLevel log_level();
void set_log_level(LogLevel level);

/// One line on stderr, prefixed with the level name.
void log(LogLevel level, std::string_view message);

inline void log_warn(std::string_view m) { log(LogLevel::Warn, m); }
inline void log_info(std::string_view m) { log(LogLevel::Info, m); }
inline void log_debug(std::string_view m) { log(LogLevel::Debug, m); }

}  // namespace jamguard
