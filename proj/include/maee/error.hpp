// SPDX-License-Identifier: Apache-2.0
#ifndef MAEE_ERROR_HPP
#define MAEE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace maee {

enum class ErrorCode {
  DegeneratePaths,
  OutOfRegion,
  BlockExhausted,
  ZeroEnergy,
  ZeroCombiner,
  ZeroGain,
  InfeasibleThroughput,
  Infeasible,
  BadStart,
  DegenerateLocalPoint,
  InvalidArgument,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegeneratePaths: return "DegeneratePaths";
    case ErrorCode::OutOfRegion: return "OutOfRegion";
    case ErrorCode::BlockExhausted: return "BlockExhausted";
    case ErrorCode::ZeroEnergy: return "ZeroEnergy";
    case ErrorCode::ZeroCombiner: return "ZeroCombiner";
    case ErrorCode::ZeroGain: return "ZeroGain";
    case ErrorCode::InfeasibleThroughput: return "InfeasibleThroughput";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::BadStart: return "BadStart";
    case ErrorCode::DegenerateLocalPoint: return "DegenerateLocalPoint";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace maee

#endif  // MAEE_ERROR_HPP
