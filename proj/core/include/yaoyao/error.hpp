#pragma once

#include <stdexcept>
#include <string>

namespace yaoyao {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: dimension mismatch, schema violation,
/// degenerate measure description, broken invariant on load.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The bracketed root search failed. `trace()` holds a JSON dump of the
/// search state at the point of failure.
class SolverError : public Error {
 public:
  enum class Kind { BracketNotFound, NonConvergence };

  SolverError(Kind kind, const std::string& what, std::string trace = {})
      : Error(what), kind_(kind), trace_(std::move(trace)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& trace() const noexcept { return trace_; }

 private:
  Kind kind_;
  std::string trace_;
};

}  // namespace yaoyao
