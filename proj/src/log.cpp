#include "floquet/log.hpp"

#include <cstdlib>
#include <memory>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace floquet {

namespace {

spdlog::level::level_enum level_from_env() {
  const char* env = std::getenv("FLOQUET_LOG");
  const std::string value = env ? env : "";
  if (value == "error") return spdlog::level::err;
  if (value == "info") return spdlog::level::info;
  if (value == "debug") return spdlog::level::debug;
  return spdlog::level::warn;
}

spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
    auto lg = std::make_shared<spdlog::logger>("floquet", sink);
    lg->set_pattern("[%l] %v");
    lg->set_level(level_from_env());
    return lg;
  }();
  return *instance;
}

}  // namespace

void log_message(LogLevel level, std::string_view message) {
  switch (level) {
    case LogLevel::Error: logger().error("{}", message); break;
    case LogLevel::Warn: logger().warn("{}", message); break;
    case LogLevel::Info: logger().info("{}", message); break;
    case LogLevel::Debug: logger().debug("{}", message); break;
  }
}

}  // namespace floquet
