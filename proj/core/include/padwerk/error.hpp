#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace padwerk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input (trace files, machine specs, config files).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_{line} {}
    explicit ParseError(const std::string& what) : Error(what) {}

    /// 1-based line number, or 0 when the error is not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

/// A value violates a documented domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Missing or inconsistent dataset content.
class DataError : public Error {
public:
    using Error::Error;
};

/// The external classifier oracle misbehaved or violated the file protocol.
class OracleError : public Error {
public:
    using Error::Error;
};

}  // namespace padwerk
