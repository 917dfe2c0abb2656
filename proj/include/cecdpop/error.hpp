#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cecdpop {

// Base of every error the library throws.
class DcopError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public DcopError {
 public:
  using DcopError::DcopError;
};

class InvalidInstance : public DcopError {
 public:
  using DcopError::DcopError;
};

class ValueOutOfDomain : public DcopError {
 public:
  using DcopError::DcopError;
};

class DisconnectedGraph : public DcopError {
 public:
  using DcopError::DcopError;
};

class UnknownVariable : public DcopError {
 public:
  using DcopError::DcopError;
};

class ProtocolError : public DcopError {
 public:
  using DcopError::DcopError;
};

class BudgetExceeded : public DcopError {
 public:
  using DcopError::DcopError;
};

class RoundLimitExceeded : public DcopError {
 public:
  using DcopError::DcopError;
};

class InvalidConfig : public DcopError {
 public:
  using DcopError::DcopError;
};

class ParseError : public DcopError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DcopError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace cecdpop
