#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gazepriv {

enum class ErrorCode {
  kAllSamplesMissing,
  kInvalidFactor,
  kInvalidVariance,
  kInvalidWindow,
  kInvalidBudget,
  kInvalidCutoff,
  kNonFiniteState,
  kNoTargets,
  kDegenerateVector,
  kEmptyPopulation,
  kRateMismatch,
  kZeroVariance,
  kDimensionMismatch,
  kZeroNorm,
  kEmptyMatrix,
  kParseError,
  kSchemaError,
  kConfigError,
  kInvalidArgument,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Data errors map to exit status 2, configuration errors to 1.
  bool is_config_error() const noexcept {
    return code_ == ErrorCode::kConfigError;
  }

 private:
  ErrorCode code_;
};

}  // namespace gazepriv
