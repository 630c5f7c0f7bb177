#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace matchwalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed edge-list input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An argument violates a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Enumeration of a state space or path family hit its budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::size_t reached)
      : Error(what + " (reached " + std::to_string(reached) + ")"), reached_(reached) {}
  std::size_t reached() const noexcept { return reached_; }

 private:
  std::size_t reached_;
};

/// A constructed object failed one of its structural guarantees
/// (a flow path left the state space, an encoding was not a matching, ...).
class CertifierFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace matchwalk
