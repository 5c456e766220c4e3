#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quda {

enum class Errc {
  NonFinite,
  NoConvergence,
  NegativeThreshold,
  NotPositiveDefinite,
  NotSymmetric,
  ShapeMismatch,
  ClassTooSmall,
  MissingClass,
  InvalidLabel,
  NonPositiveRho,
  ZeroDiagonal,
  EmptyInput,
  TooFewPerClass,
  InvalidSpec,
  InvalidArgument,
  IoError,
  ParseError,
  SchemaVersionMismatch,
  CorruptPayload,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Re-throws `e` with `stage` prepended to the message, keeping the code.
[[noreturn]] inline void rethrow_in_stage(const Error& e, std::string_view stage) {
  throw Error(e.code(), std::string(stage) + ": " + e.what());
}

}  // namespace quda
