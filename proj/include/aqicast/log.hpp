#pragma once

#include <string_view>

namespace aqicast::log {

/// Reads AQICAST_LOG (trace, debug, info, warn, error, off; default warn)
/// and routes messages to stderr. Safe to call more than once.
void init_from_env();

void debug(std::string_view message);
void info(std::string_view message);
void warn(std::string_view message);

}  // namespace aqicast::log
