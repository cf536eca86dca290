#pragma once

#include <stdexcept>
#include <string>

namespace thinc {

/// Base class for all library errors. `category()` is a stable, machine-parseable tag.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept = 0;
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "config"; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  const char* category() const noexcept override { return "parse"; }
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Violation of an algorithmic guarantee or precondition (indicates a bug or bad input state).
class SolverError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "solver"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "io"; }
};

}  // namespace thinc
