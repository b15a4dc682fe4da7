#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller-side problems: bad arguments, malformed files, contract violations.
// The CLI maps this branch to exit code 2.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class FormatError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class SchemaError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InvalidInput(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class UnsupportedKernel : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Runtime failures of an otherwise valid request.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

}  // namespace hawkes
