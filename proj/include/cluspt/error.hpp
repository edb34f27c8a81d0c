#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cluspt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed instance text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
      : Error(line ? "line " + std::to_string(line) +
                         (column ? ", column " + std::to_string(column) : std::string()) + ": " +
                         what
                   : what),
        message_(what),
        line_(line),
        column_(column) {}

  /// The message without location.
  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The instance is well formed but admits no clustered spanning tree.
class InfeasibleInstance : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DisconnectedSubgraph : public InfeasibleInstance {
 public:
  using InfeasibleInstance::InfeasibleInstance;
};

class DisconnectedClusterGraph : public InfeasibleInstance {
 public:
  using InfeasibleInstance::InfeasibleInstance;
};

class NotATree : public Error {
 public:
  using Error::Error;
};

/// Some cluster cannot be entered through its chosen root.
class InfeasibleRoots : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

class InvalidBaseline : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace cluspt
