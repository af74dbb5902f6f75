#pragma once

#include <stdexcept>
#include <string>

namespace bifurc {

// A vector field or branch lift was evaluated at a singular denominator.
// The message names the denominator (or the root) that blew up.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An iteration failed to converge, a step size underflowed, or an output
// file could not be written. `where` carries the bracket midpoint or the
// integration time reached, when meaningful.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg, double where = 0.0)
      : std::runtime_error(msg), where_(where) {}
  double where() const { return where_; }

private:
  double where_;
};

// A documented precondition was violated by the caller.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// A normal-form computation hit a degenerate configuration (fold on top of
// a Hopf point, vanishing cubic coefficient).
class DegeneracyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A run configuration failed schema validation. Names the offending key.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace bifurc
