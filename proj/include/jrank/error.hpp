#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jrank {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit the operation.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A precondition on argument values was violated.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input record. `line()` is 1-based, 0 when not line oriented.
class FormatError : public Error {
public:
    FormatError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Inconsistent dataset contents (dangling ids, duplicate ids).
class DataError : public Error {
public:
    using Error::Error;
};

/// Non-finite values met during optimization.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace jrank
