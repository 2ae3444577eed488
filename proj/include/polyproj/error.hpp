#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyproj {

enum class ErrorCode {
  DimensionMismatch,
  InvalidInput,
  ExplicitOrderSingular,
  NotPositiveDefinite,
  PointOutside,
  QInside,
  InconsistentEqualities,
  InfeasibleSystem,
  PreconditionViolated,
  StartNotVisible,
  TargetInside,
  SafeguardExceeded,
  TooLarge,
  RankDeficient,
  EmptyParameterPolyhedron,
  VertexSearchExhausted,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ExplicitOrderSingular: return "ExplicitOrderSingular";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::PointOutside: return "PointOutside";
    case ErrorCode::QInside: return "QInside";
    case ErrorCode::InconsistentEqualities: return "InconsistentEqualities";
    case ErrorCode::InfeasibleSystem: return "InfeasibleSystem";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::StartNotVisible: return "StartNotVisible";
    case ErrorCode::TargetInside: return "TargetInside";
    case ErrorCode::SafeguardExceeded: return "SafeguardExceeded";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::EmptyParameterPolyhedron: return "EmptyParameterPolyhedron";
    case ErrorCode::VertexSearchExhausted: return "VertexSearchExhausted";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace polyproj
