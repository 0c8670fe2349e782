#pragma once

#include <stdexcept>
#include <string>

namespace mqt {

// Argument outside the mathematical domain of an operation (alpha outside
// (0,1), time outside [0,1], velocity queried off the support).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Violated precondition between arguments, e.g. couplings whose marginals do
// not line up.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exact (oracle-scale) computation would exceed its size cap.
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Malformed external input. `line` is 0 when the error is not tied to a
// position in a text document.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& field, const std::string& what, int line = 0)
      : std::runtime_error(format(field, what, line)), field_(field), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& what, int line) {
    std::string msg = "parse error";
    if (line > 0) msg += " at line " + std::to_string(line);
    if (!field.empty()) msg += " in field '" + field + "'";
    return msg + ": " + what;
  }

  std::string field_;
  int line_;
};

}  // namespace mqt
