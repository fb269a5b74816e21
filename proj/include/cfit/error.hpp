#pragma once

#include <stdexcept>
#include <string>

namespace cfit {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyGraphError : public Error {
 public:
  EmptyGraphError() : Error("empty graph") {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An objective that has no value on the given input (e.g. modularity with M = 0).
class UndefinedObjective : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace cfit
