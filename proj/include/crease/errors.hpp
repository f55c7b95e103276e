#ifndef CREASE_ERRORS_HPP
#define CREASE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crease {

/// Invalid argument or configuration (maps to CLI exit code 2).
struct parameter_error : std::invalid_argument {
    explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// File or format problem (maps to CLI exit code 2).
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values or a diverged computation (maps to CLI exit code 3).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace crease

#endif
