#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eslab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (alpha out of range, negative penalty, invalid generator parameters).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Two objects that must agree in size do not.
class DimensionError : public Error {
  public:
    DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
        : Error(what + ": expected " + std::to_string(expected) + ", got " +
                std::to_string(actual)),
          expected_(expected),
          actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

  private:
    std::size_t expected_;
    std::size_t actual_;
};

/// Input text (CSV, JSON, CLI strings) could not be parsed.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// The simplex kernel could not finish (iteration cap, lost feasibility).
class NumericalError : public Error {
  public:
    using Error::Error;
};

}  // namespace eslab
