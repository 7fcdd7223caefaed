#include "srda/log.hpp"

#include <cstdlib>
#include <iostream>

namespace srda {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("SRDA_LOG");
        if (!env) return LogLevel::Info;
        const std::string s = env;
        if (s == "error") return LogLevel::Error;
        if (s == "debug") return LogLevel::Debug;
        return LogLevel::Info;
    }();
    return level;
}

void log_error(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info) std::cerr << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::Debug) std::cerr << "debug: " << msg << "\n";
}

} // namespace srda
