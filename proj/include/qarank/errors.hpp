#pragma once

#include <stdexcept>
#include <string>

namespace qarank {

// Exit-code contract: usage/config problems -> 1, bad input data -> 2,
// broken internal invariants -> 3.

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace qarank
