#ifndef SELFGEN_ERRORS_H_
#define SELFGEN_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selfgen {

// Base of every error raised by the library. Callers that only need to
// report a failure can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Attribute or value not licensed by the domain schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A slot value selected for delexicalization does not occur in the text.
class DelexMissError : public Error {
 public:
  explicit DelexMissError(const std::string& attribute)
      : Error("delexicalization miss: value of '" + attribute +
              "' not found in utterance"),
        attribute_(attribute) {}
  const std::string& attribute() const { return attribute_; }

 private:
  std::string attribute_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

// Violated precondition of an operation (empty input, misaligned lists...).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace selfgen

#endif  // SELFGEN_ERRORS_H_
