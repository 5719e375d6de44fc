#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mbd {

// Root of every domain error raised by the library. Callers that only care
// about "something in the diagnosis domain went wrong" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The consistency oracle could not answer.
class ReasonerError : public Error {
 public:
  using Error::Error;
};

// The built-in checker ran out of its branch-decision budget.
class ResourceLimitError : public ReasonerError {
 public:
  using ReasonerError::ReasonerError;
};

// An exhaustive procedure was asked to handle more components than allowed.
class BoundExceededError : public Error {
 public:
  using Error::Error;
};

// A precondition of an operation was not met by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class QueryError : public Error {
 public:
  using Error::Error;
};

// A DPI whose background, observations and measurements are inconsistent
// even with every component abnormal.
class NoDiagnosisError : public Error {
 public:
  using Error::Error;
};

// Invalid transition of a sequential-diagnosis session.
class SessionError : public Error {
 public:
  using Error::Error;
};

// An answer referring to a query that is no longer pending.
class StaleQueryError : public SessionError {
 public:
  using SessionError::SessionError;
};

// No candidate atom splits the leading diagnoses.
class NoDiscriminatingMeasurementError : public SessionError {
 public:
  using SessionError::SessionError;
};

// The measurement outcome leaves the DPI without any diagnosis.
class InconsistentAnswerError : public SessionError {
 public:
  using SessionError::SessionError;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        message_(message),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

// Well-formed text describing an invalid DPI (duplicate component, rate out
// of range, unsatisfiable instance, ...). Line is 0 when not attributable.
class SemanticError : public Error {
 public:
  SemanticError(const std::string& message, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + message : message), message_(message), line_(line) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string message_;
  std::size_t line_;
};

}  // namespace mbd
