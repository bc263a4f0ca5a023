#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace osmo {

// Machine-readable error codes. The names double as the wire-level "code"
// strings in service error responses; keep them stable.
enum class Errc {
  InvalidCoordinate,
  ParseError,
  DanglingReference,
  DuplicateObject,
  BuildRejected,
  AreaNotFound,
  AmbiguousArea,
  InvalidLimit,
  InvalidBoundingBox,
  ObjectNotFound,
  NoMatch,
  NoObjects,
  IdOverflow,
  MalformedPayload,
  UnknownFunction,
  BadRequest,
  LimitTooLarge,
  NotReady,
  Internal,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace osmo
