#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace viewaug {

enum class ErrorCode {
  kInvalidRotation,
  kInvalidQuaternion,
  kInvalidDepth,
  kInsufficientViews,
  kDegenerateGeometry,
  kShape,
  kDomain,
  kInvalidArgument,
  kIo,
  kParse,
  kVersion,
};

std::string_view to_string(ErrorCode code);

/// Single exception type raised by the library. The code lets callers (the
/// CLI in particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidRotation: return "invalid rotation";
    case ErrorCode::kInvalidQuaternion: return "invalid quaternion";
    case ErrorCode::kInvalidDepth: return "invalid depth";
    case ErrorCode::kInsufficientViews: return "insufficient views";
    case ErrorCode::kDegenerateGeometry: return "degenerate geometry";
    case ErrorCode::kShape: return "shape error";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kVersion: return "version error";
  }
  return "error";
}

}  // namespace viewaug
