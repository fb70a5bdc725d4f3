#pragma once

#include <string_view>

namespace bnpfc {

enum class LogLevel { Quiet = 0, Warning = 1, Info = 2 };

void set_log_level(LogLevel level);
LogLevel log_level();

// Thread-safe; writes to stderr.
void log_warning(std::string_view message);
void log_info(std::string_view message);

}  // namespace bnpfc
