#pragma once

#include <functional>
#include <string>

namespace hawkes {

using WarningHandler = std::function<void(const std::string&)>;

// Default handler prints "warning: <msg>" to stderr. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace hawkes
