#pragma once

#include <stdexcept>
#include <string>

namespace wirebend {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Malformed graph, program, or profile document.
class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse_error"; }
};

/// Structurally valid input that violates a model precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_input"; }
};

/// Compensation parameters put an inverse-trig argument outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain_error"; }
};

/// A command or program exceeds what the machine can do.
class LimitError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "limit_error"; }
};

class MachineError : public Error {
 public:
  MachineError(const std::string& what, int code = 0) : Error(what), code_(code) {}
  const char* kind() const noexcept override { return "machine_error"; }
  int code() const noexcept { return code_; }

 private:
  int code_;
};

}  // namespace wirebend
