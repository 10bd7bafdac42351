#pragma once

#include <stdexcept>
#include <string>

namespace pnr {

/// The data cannot identify the parameters at all, e.g. a histogram in which
/// no experiment ever detected a photon (every emitter count fits equally).
class UnidentifiableDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical operation failed (singular Fisher matrix, non-PD covariance).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number of the offense.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, long line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace pnr
