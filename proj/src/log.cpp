#include "aqicast/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <mutex>
#include <string>

namespace aqicast::log {
namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> instance;
  std::call_once(once, [] {
    instance = spdlog::stderr_color_mt("aqicast");
    instance->set_pattern("[%Y-%m-%d %H:%M:%S.%e] [%^%l%$] %v");
    instance->set_level(spdlog::level::warn);
  });
  return instance;
}

}  // namespace

void init_from_env() {
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("AQICAST_LOG"); env != nullptr && *env != '\0') {
    level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") level = spdlog::level::warn;
  }
  logger()->set_level(level);
}

void debug(std::string_view message) { logger()->debug("{}", message); }
void info(std::string_view message) { logger()->info("{}", message); }
void warn(std::string_view message) { logger()->warn("{}", message); }

}  // namespace aqicast::log
