#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rw {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed KB or query text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Undeclared symbol, arity mismatch, unbound variable.
class SymbolError : public Error {
 public:
  using Error::Error;
};

/// A construct the evaluator refuses (function symbols, non-unary input to a
/// unary-only routine, unsupported constraint shapes).
class UnsupportedFeature : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed the configured evaluation cap.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what_blows_up, const std::string& required,
                 const std::string& cap);
  const std::string& required() const noexcept { return required_; }
  const std::string& cap() const noexcept { return cap_; }

 private:
  std::string required_;
  std::string cap_;
};

/// Fixed-width exact arithmetic ran out of range.
class ArithmeticOverflow : public Error {
 public:
  using Error::Error;
};

/// Function evaluated outside its domain (e.g. Dempster's rule on {0, 1}).
class UndefinedInput : public Error {
 public:
  using Error::Error;
};

/// Constraint set with no feasible point.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Context class with zero mass at the maximum-entropy point.
class ZeroMassContext : public Error {
 public:
  using Error::Error;
};

}  // namespace rw
