#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tiltgest {

enum class Errc {
  MalformedRecord,
  NonMonotoneTimestamp,
  EmptyTrace,
  InvalidSpec,
  WrongWindowLength,
  InvalidArgument,
  SteadyAlreadyCalibrated,
  BorderViolation,
  DuplicateLabel,
  SteadyMissing,
  ZeroVector,
  EmptySet,
  InvalidConfig,
  ParseError,
  UnknownDirection,
  DuplicateGestureKey,
  UnknownMode,
  CalibrationFailed,
  NoStablePose,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::NonMonotoneTimestamp: return "NonMonotoneTimestamp";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::WrongWindowLength: return "WrongWindowLength";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SteadyAlreadyCalibrated: return "SteadyAlreadyCalibrated";
    case Errc::BorderViolation: return "BorderViolation";
    case Errc::DuplicateLabel: return "DuplicateLabel";
    case Errc::SteadyMissing: return "SteadyMissing";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::EmptySet: return "EmptySet";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownDirection: return "UnknownDirection";
    case Errc::DuplicateGestureKey: return "DuplicateGestureKey";
    case Errc::UnknownMode: return "UnknownMode";
    case Errc::CalibrationFailed: return "CalibrationFailed";
    case Errc::NoStablePose: return "NoStablePose";
  }
  return "Unknown";
}

/// Every failure raised by the library. `detail()` carries the offending
/// field, label or line number; `what()` renders as `Code(detail): message`.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string detail, const std::string& message = {})
      : std::runtime_error(render(code, detail, message)),
        code_(code),
        detail_(std::move(detail)) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string render(Errc code, const std::string& detail,
                            const std::string& message) {
    std::string out(to_string(code));
    if (!detail.empty()) out += "(" + detail + ")";
    if (!message.empty()) out += ": " + message;
    return out;
  }

  Errc code_;
  std::string detail_;
};

}  // namespace tiltgest
