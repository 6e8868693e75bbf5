#pragma once

#include <stdexcept>
#include <string>

namespace fr {

enum class ErrorCode {
  InvalidInput,
  ModulusMismatch,
  CriticalAngle,
  NotAPermutation,
  InvalidMs,
  DepthCap,
  NotInvariant,
  VertexMismatch,
  MissingValue,
  Disconnected,
  NonConvergence,
  CapExceeded,
  KappaUndefined,
  NotInMJ,
  DegenerateInput,
  SubsetInvalid,
  Schema,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fr
