#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bbsim {

/// Base class of every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid platform, policy or simulation configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A demand that can never be satisfied on this platform.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Not enough free nodes or storage to satisfy an allocation request.
class AllocationError : public Error {
public:
    using Error::Error;
};

/// A reservation would drive free capacity negative.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Broken internal invariant (a simulator bug, never a user error).
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace bbsim
