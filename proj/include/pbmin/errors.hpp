#pragma once

#include <stdexcept>

namespace pbmin {

// Violated numeric-domain precondition: parameter outside its range,
// posterior not aligned with its profile, unmet certificate premise.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent user-supplied data: unreadable file, parse
// failure, dimension mismatch between files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pbmin
