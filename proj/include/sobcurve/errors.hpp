#pragma once

#include <stdexcept>
#include <string>

namespace sobcurve {

enum class ErrorCode {
  InsufficientSamples = 1,
  DegenerateCurve,
  NonPositiveLowerBound,
  NonPositiveQ,
  DegenerateInit,
  MaxIters,
  InfiniteEnergy,
  NoConvergence,
  DegeneratePlane,
  InvalidArgument,
  Io,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateCurve: return "DegenerateCurve";
    case ErrorCode::NonPositiveLowerBound: return "NonPositiveLowerBound";
    case ErrorCode::NonPositiveQ: return "NonPositiveQ";
    case ErrorCode::DegenerateInit: return "DegenerateInit";
    case ErrorCode::MaxIters: return "MaxIters";
    case ErrorCode::InfiniteEnergy: return "InfiniteEnergy";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegeneratePlane: return "DegeneratePlane";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace sobcurve
