#ifndef SRDA_LOG_HPP
#define SRDA_LOG_HPP

#include <string>

namespace srda {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Verbosity from the SRDA_LOG environment variable (error|info|debug),
/// read once; defaults to info. Messages go to stderr.
LogLevel log_level();

void log_error(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

} // namespace srda

#endif
