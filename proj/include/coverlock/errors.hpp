#ifndef COVERLOCK_ERRORS_HPP
#define COVERLOCK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coverlock {

// Every failure the library can surface, one enumerator per documented
// error condition. The CLI maps these onto process exit codes.
enum class ErrorKind {
  // instance validation
  kNonPositiveCost,
  kNonPositiveBudget,
  kCoverageOutOfRange,
  kLengthMismatch,
  kNonFiniteEntry,
  // solver failures
  kInfeasible,
  kTooLarge,
  kNoFeasibleCutoff,
  kCoreInfeasible,
  kTargetOutOfRange,
  kRoundingInfeasible,
  kNumericalFailure,
  // experiment harness
  kTooManyInfeasibleDraws,
  // input / configuration
  kInvalidInput,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace coverlock

#endif  // COVERLOCK_ERRORS_HPP
