#include "hawkes/log.hpp"

#include <iostream>
#include <mutex>

namespace hawkes {

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& current_handler() {
  static WarningHandler handler = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  auto previous = std::move(current_handler());
  current_handler() = std::move(handler);
  return previous;
}

void warn(const std::string& message) {
  std::lock_guard lock(handler_mutex());
  if (current_handler()) current_handler()(message);
}

}  // namespace hawkes
