#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rfib {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed seeds, words, or base products that fail validation.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class QuotientExhausted : public Error {
 public:
  explicit QuotientExhausted(std::size_t index)
      : Error("quotient sequence exhausted at q_" + std::to_string(index)), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class PrefixViolation : public Error {
 public:
  using Error::Error;
};

class DigitBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class InsufficientHorizon : public Error {
 public:
  using Error::Error;
};

// An operation was called on a spec of the wrong growth case.
class WrongCase : public Error {
 public:
  using Error::Error;
};

}  // namespace rfib
