#pragma once

#include <stdexcept>
#include <string>

namespace jamguard {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (non-finite, negative, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or hyperparameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// File parsed but its columns or fields do not match the expected schema.
class SchemaError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Operation requires state that is not there yet (unfitted model, missing artifact, ...).
class StateError : public Error {
public:
    using Error::Error;
};

}  // namespace jamguard
