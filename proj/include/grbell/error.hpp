#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace grbell {

enum class ErrorCode {
  HorizonDomain,
  InvalidChart,
  BasePointMismatch,
  HorizonApproach,
  StepFailure,
  BadNormalization,
  CommonOriginMismatch,
  StaticFrameUnavailable,
  DegenerateBasis,
  ZeroVector,
  DegenerateD,
  InsufficientSamples,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library. The optional stage names the
// pipeline step (geodesic, transport, projection, ...) that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::string stage = {})
      : std::runtime_error(what), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  Error with_stage(std::string stage) const {
    return Error(code_, what(), std::move(stage));
  }

 private:
  ErrorCode code_;
  std::string stage_;
};

}  // namespace grbell
