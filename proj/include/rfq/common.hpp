#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rfq {

using Bytes = std::vector<std::uint8_t>;

/// Virtual time in integer microseconds since scenario start.
using Micros = std::int64_t;

using Hertz = double;
using BitsPerSecond = double;
using Dbm = double;

enum class ErrorCode {
  kInvalidArgument,
  kOutOfRange,
  kUnsupported,
  kUnknownRadio,
  kUnknownActor,
  kUnknownTopic,
  kDuplicate,
  kBadState,
  kFraming,
  kSchema,
  kNotImplemented,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

std::string to_hex(std::span<const std::uint8_t> data);

// Accepts upper or lower case; throws kInvalidArgument on odd length or
// non-hex characters.
Bytes from_hex(std::string_view hex);

}  // namespace rfq
