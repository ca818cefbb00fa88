#pragma once

#include <stdexcept>
#include <string>

namespace gcvx {

enum class ErrorCode {
  NonFinite,
  CapExceeded,
  PoleExceeded,
  EmptyInput,
  LengthMismatch,
  DriftExceeded,
  StepRuleUnresolvable,
  UnsupportedComposite,
  CouplingUnsupported,
  InnerBudgetExceeded,
  Diverged,
  ConfigInvalid,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gcvx
