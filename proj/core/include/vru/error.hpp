#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vru {

// Coarse error category, mapped onto CLI exit codes by exit_code().
enum class ErrorKind { kInput, kNumerical, kConfig };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// 2 input/validation, 3 numerical non-convergence, 4 configuration.
int exit_code(ErrorKind kind) noexcept;

#define VRU_DEFINE_ERROR(Name, Kind)                   \
  class Name : public Error {                          \
   public:                                             \
    explicit Name(const std::string& what)             \
        : Error(ErrorKind::Kind, #Name ": " + what) {} \
  }

VRU_DEFINE_ERROR(SchemaError, kInput);
VRU_DEFINE_ERROR(UseCaseError, kInput);
VRU_DEFINE_ERROR(MismatchError, kInput);
VRU_DEFINE_ERROR(IoError, kInput);
VRU_DEFINE_ERROR(GeometryError, kInput);
VRU_DEFINE_ERROR(EmptyGroupError, kInput);
VRU_DEFINE_ERROR(DegenerateFitError, kInput);
VRU_DEFINE_ERROR(TooFewCollisionsError, kInput);
VRU_DEFINE_ERROR(MissingClassError, kInput);
VRU_DEFINE_ERROR(ZeroBaselineError, kInput);
VRU_DEFINE_ERROR(InsufficientDataError, kInput);
VRU_DEFINE_ERROR(SingleClassError, kInput);
VRU_DEFINE_ERROR(MissingVariableError, kInput);
VRU_DEFINE_ERROR(ZeroDenominatorError, kInput);
VRU_DEFINE_ERROR(SeparationError, kNumerical);
VRU_DEFINE_ERROR(ConfigError, kConfig);

#undef VRU_DEFINE_ERROR

// Row-located validation failure. `row` is the 1-based data row (header
// excluded); 0 means the failure is not tied to a row.
class ValueError : public Error {
 public:
  ValueError(std::size_t row, const std::string& what);

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Iterative fit that ran out of iterations. Carries the best parameters seen
// so callers may inspect or fall back.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> best)
      : Error(ErrorKind::kNumerical, "NonConvergenceError: " + what),
        best_(std::move(best)) {}

  const std::vector<double>& best() const noexcept { return best_; }

 private:
  std::vector<double> best_;
};

}  // namespace vru
