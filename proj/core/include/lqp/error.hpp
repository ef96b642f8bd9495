#pragma once

#include <stdexcept>
#include <string>

namespace lqp {

enum class ErrorCode {
  InvalidMatrix,
  NotPSD,
  NotNonnegativeCost,
  LinearTermOutsideRange,
  InvalidRadius,
  SingularCrossTerm,
  NotPD,
  InvalidParameter,
  InfeasibleTrace,
  OracleDiverged,
  InvalidTolerance,
  NumericalFailure,
  OutOfRegime,
  InputError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lqp
