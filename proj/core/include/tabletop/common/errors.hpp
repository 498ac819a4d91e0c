#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tabletop {

enum class ErrorCode {
  ParseError,
  ValidationError,
  SceneError,
  ActionError,
  VisionNotFound,
  EmptyCloud,
  CaptureError,
  GraspInfeasible,
  BackendTimeout,
  BackendProtocol,
  IoError,
};

std::string_view error_code_name(ErrorCode code);

// Single exception type for the whole library. The code tells callers which
// stage failed; the message is already formatted for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "parse error";
    case ErrorCode::ValidationError: return "validation error";
    case ErrorCode::SceneError: return "scene error";
    case ErrorCode::ActionError: return "action error";
    case ErrorCode::VisionNotFound: return "vision: object not found";
    case ErrorCode::EmptyCloud: return "vision: empty cloud";
    case ErrorCode::CaptureError: return "capture error";
    case ErrorCode::GraspInfeasible: return "grasp infeasible";
    case ErrorCode::BackendTimeout: return "backend timeout";
    case ErrorCode::BackendProtocol: return "backend protocol error";
    case ErrorCode::IoError: return "io error";
  }
  return "error";
}

}  // namespace tabletop
