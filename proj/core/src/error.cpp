#include "lqp/error.hpp"

namespace lqp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotNonnegativeCost: return "NotNonnegativeCost";
    case ErrorCode::LinearTermOutsideRange: return "LinearTermOutsideRange";
    case ErrorCode::InvalidRadius: return "InvalidRadius";
    case ErrorCode::SingularCrossTerm: return "SingularCrossTerm";
    case ErrorCode::NotPD: return "NotPD";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::InfeasibleTrace: return "InfeasibleTrace";
    case ErrorCode::OracleDiverged: return "OracleDiverged";
    case ErrorCode::InvalidTolerance: return "InvalidTolerance";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::OutOfRegime: return "OutOfRegime";
    case ErrorCode::InputError: return "InputError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace lqp
