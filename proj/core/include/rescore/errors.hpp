#pragma once

#include <stdexcept>
#include <string>

namespace rescore {

// Invalid input: out-of-range scores, shape mismatches, bad state indices.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed files or configuration documents.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative fit failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rescore
