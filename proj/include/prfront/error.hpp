#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prfront {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed characterization text. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DuplicateError : public ParseError {
public:
    using ParseError::ParseError;
};

/// A value outside its mathematical domain (nonpositive rate, zero fraction, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Plan does not fit the fabric. `resource()` names the violated class ("lut", "bram36", "dsp").
class FeasibilityError : public Error {
public:
    FeasibilityError(std::string resource, const std::string& message)
        : Error(message), resource_(std::move(resource)) {}
    const std::string& resource() const noexcept { return resource_; }

private:
    std::string resource_;
};

/// Intermediate buffers exceed the platform's capacity.
class CapacityError : public Error {
public:
    CapacityError(unsigned long long required, unsigned long long available)
        : Error("buffer requirement " + std::to_string(required) + " bytes exceeds capacity " +
                std::to_string(available) + " bytes"),
          required_(required),
          available_(available) {}
    unsigned long long required() const noexcept { return required_; }
    unsigned long long available() const noexcept { return available_; }

private:
    unsigned long long required_;
    unsigned long long available_;
};

/// Plan is structurally malformed for its strategy (missing k, bad fraction, ...).
class PlanError : public Error {
public:
    using Error::Error;
};

class SimulationError : public Error {
public:
    using Error::Error;
};

/// Exhaustive search refused because the instance exceeds the size guard.
class GuardError : public Error {
public:
    using Error::Error;
};

}  // namespace prfront
