#pragma once

#include <string_view>

namespace floquet {

enum class LogLevel { Error, Warn, Info, Debug };

/// Writes to stderr when `level` is enabled. The threshold comes from the
/// FLOQUET_LOG environment variable (error, warn, info, debug; default warn).
void log_message(LogLevel level, std::string_view message);

}  // namespace floquet
