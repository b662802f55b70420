#pragma once

#include <stdexcept>
#include <string>

namespace jmech {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed DSL source or system file. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& bare_message() const noexcept { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

/// A precondition on the inputs of an operation does not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The integrated state left the finite range.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& message, double last_good_time)
      : Error(message), last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

/// The truncated basis cannot represent a state accurately enough.
class CaptureError : public Error {
 public:
  CaptureError(const std::string& message, double captured)
      : Error(message), captured_(captured) {}

  double captured() const noexcept { return captured_; }

 private:
  double captured_;
};

}  // namespace jmech
