#pragma once

#include <stdexcept>
#include <string>

namespace discround {

// Input files / constraint descriptions that fail schema or range checks.
// CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Well-formed input that violates an algorithmic precondition (infeasible
// starting point, width condition on the lambda vector, ...).  Exit code 3.
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// The rounding loop exhausted its restart/step budget without reaching its
// success target.  Exit code 4.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace discround
