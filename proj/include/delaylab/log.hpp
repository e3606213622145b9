#pragma once

#include <string_view>

namespace delaylab {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

// From DELAYLAB_LOG (quiet|info|debug); info when unset or unrecognized.
LogLevel log_level();

void log_warning(std::string_view message);  // printed unless quiet
void log_info(std::string_view message);
void log_debug(std::string_view message);

}  // namespace delaylab
