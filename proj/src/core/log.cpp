#include "bnpfc/core/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace bnpfc {
namespace {

std::atomic<LogLevel> g_level{LogLevel::Warning};
std::mutex g_mutex;

void emit(std::string_view prefix, std::string_view message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::clog << prefix << message << '\n';
}

}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }
LogLevel log_level() { return g_level.load(); }

void log_warning(std::string_view message) {
  if (g_level.load() >= LogLevel::Warning) emit("warning: ", message);
}

void log_info(std::string_view message) {
  if (g_level.load() >= LogLevel::Info) emit("", message);
}

}  // namespace bnpfc
