#pragma once

#include <stdexcept>
#include <string>

namespace stbc {

/// Operand shapes do not agree (symbol vector vs. code, channel vs. codeword, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called outside its domain (singular D_A, unreachable capacity, ...).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical breakdown: non-finite log-determinant or failed factorization.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stbc
