#include "shearinst/error.hpp"

namespace shearinst {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::RatioUndefined: return "RatioUndefined";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingularOperator: return "SingularOperator";
    case ErrorCode::SingularityOnBoundary: return "SingularityOnBoundary";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NoUnstableNeutralMode: return "NoUnstableNeutralMode";
    case ErrorCode::NoBoundState: return "NoBoundState";
    case ErrorCode::NotConverging: return "NotConverging";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::ImagNotPositive: return "ImagNotPositive";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::DivergentCoefficient: return "DivergentCoefficient";
    case ErrorCode::SingularT: return "SingularT";
    case ErrorCode::NeumannDiverging: return "NeumannDiverging";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::WindingMismatch: return "WindingMismatch";
    case ErrorCode::PhaseUnwrapAmbiguous: return "PhaseUnwrapAmbiguous";
    case ErrorCode::ConvergedToRealAxis: return "ConvergedToRealAxis";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::BlockNotContracting: return "BlockNotContracting";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace shearinst
