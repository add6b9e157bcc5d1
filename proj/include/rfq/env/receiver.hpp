#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <variant>

#include "rfq/common.hpp"

namespace rfq::env {

/// Accepts a code iff last < code <= last + window. Accepted codes are
/// consumed by moving `last` forward.
struct RollingCodeRule {
  std::size_t code_offset = 0;  // u32 big-endian inside the packet data
  std::uint32_t window = 256;
  std::uint32_t last = 0;
};

/// Accepts any well-formed packet whose data starts with `prefix`.
struct CommandRule {
  Bytes prefix;
};

using AcceptanceRule = std::variant<RollingCodeRule, CommandRule>;

struct ReceiverActor {
  std::string id;
  Hertz carrier = 433.92e6;
  Hertz bandwidth = 325e3;
  BitsPerSecond bitrate = 3400;
  double bitrate_tolerance = 0.05;
  Bytes sync_word;
  std::size_t packet_len = 0;  // data bytes, CRC excluded
  bool crc = true;
  AcceptanceRule rule = CommandRule{};
};

struct ReceiverDecision {
  bool accepted = false;
  std::string reason;
};

struct ReceptionEvent {
  Micros at = 0;
  std::string actor;
  std::string source;
  Bytes data;
  bool accepted = false;
  std::string reason;
};

std::uint32_t read_code(std::span<const std::uint8_t> data, std::size_t offset);
void write_code(Bytes& data, std::size_t offset, std::uint32_t code);

}  // namespace rfq::env
