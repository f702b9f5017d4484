#pragma once

#include <stdexcept>
#include <string>

namespace lstarf {

/// Bad argument or violated precondition (shape mismatch, out-of-range rank, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative kernel failed to converge or produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input lies outside the set on which a lemma or construction is defined.
/// This is not a failure of the lemma itself.
class InfeasibleInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lstarf
