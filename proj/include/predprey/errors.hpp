#pragma once

#include <stdexcept>
#include <string>

namespace predprey {

// Raised when an experiment config fails to parse or validate (CLI exit code 2).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by numerical routines: blow-up, non-convergence, corrupted state
// (CLI exit code 3).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace predprey
