#pragma once

#include <stdexcept>
#include <string>

namespace dimsum {

// Exit status conventions shared by the CLI.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParameter = 2,
  kNumeric = 3,
  kSuiteFailure = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::kParameter; }
};

// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class DuplicateError : public Error {
 public:
  using Error::Error;
};

// All-zero or otherwise empty input where a nonzero is required.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Dense work requested above the n <= 10^4 guard.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Caller passed an object of the wrong kind (e.g. a gram matrix where a
// cosine matrix is required).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Input violates the value regime a verification suite depends on.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A mapper or reducer threw; message is prefixed with row or key context.
class JobError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kNumeric; }
};

}  // namespace dimsum
