#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace madp {

enum class ErrorCode {
  InvalidArgument,
  ZeroNorm,
  DimensionMismatch,
  EmptyImage,
  ImageDecode,
  BackendUnavailable,
  KeyMissing,
  TokenizationOverflow,
  MalformedTemplate,
  DegenerateClassCounts,
  EmptyList,
  Config,
  Data,
  MissingEmbedding,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the core carries one of the codes above; the C API
// maps them onto status values and the CLI onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace madp
