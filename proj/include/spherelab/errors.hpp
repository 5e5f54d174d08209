#pragma once

#include <stdexcept>
#include <string>

namespace spherelab {

// Precondition / configuration errors.
struct NotCoprimeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BadRangeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct HypothesisViolatedError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnknownRegionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct EmptySphereError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Resource limits.
struct BudgetExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GridTooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RecursionBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical / structural failures discovered at run time.
struct QuadratureNotConvergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The covering set of a Farey point failed to be an inverse range.  This
// must never fire: it signals either a bug or a counterexample to the
// inverse-range structure of the dissection.
struct PropositionViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spherelab
