#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace proofdoor {

// Base of every error raised by the library. CLI maps subclasses onto exit
// codes (input 2, blow-up/budget 3, validation 4).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input: DIMACS, DRAT, chunk maps, CSV, JSON sidecars.
class InputError : public Error {
public:
  explicit InputError(const std::string &what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

// An intermediate formula exceeded its configured clause cap.
class BlowupError : public Error {
public:
  BlowupError(const std::string &what, std::size_t clauses_at_abort,
              std::size_t eliminated_vars)
      : Error(what), clauses_at_abort_(clauses_at_abort),
        eliminated_vars_(eliminated_vars) {}

  std::size_t clauses_at_abort() const { return clauses_at_abort_; }
  std::size_t eliminated_vars() const { return eliminated_vars_; }

private:
  std::size_t clauses_at_abort_;
  std::size_t eliminated_vars_;
};

// A solver call ran out of its conflict or time budget.
class BudgetExhausted : public Error {
public:
  using Error::Error;
};

// A structural contract between arguments was violated (dimension
// mismatch, wrong permutation domain, untagged proof leaf, ...).
class ContractError : public Error {
public:
  using Error::Error;
};

} // namespace proofdoor
