#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shearinst {

enum class ErrorCode {
  InvalidArgument = 1,
  OutOfDomain,
  UnsupportedOrder,
  RatioUndefined,
  ShapeMismatch,
  SingularOperator,
  SingularityOnBoundary,
  NoConvergence,
  NoUnstableNeutralMode,
  NoBoundState,
  NotConverging,
  NoCrossing,
  ImagNotPositive,
  InvalidRange,
  DivergentCoefficient,
  SingularT,
  NeumannDiverging,
  NotConverged,
  WindingMismatch,
  PhaseUnwrapAmbiguous,
  ConvergedToRealAxis,
  BoundViolation,
  BlockNotContracting,
  ConfigError,
  IoError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace shearinst
