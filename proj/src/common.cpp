#include "rfq/common.hpp"

#include "rfq/crc.hpp"

namespace rfq {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kUnknownRadio: return "unknown_radio";
    case ErrorCode::kUnknownActor: return "unknown_actor";
    case ErrorCode::kUnknownTopic: return "unknown_topic";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kBadState: return "bad_state";
    case ErrorCode::kFraming: return "framing";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kNotImplemented: return "not_implemented";
  }
  return "unknown";
}

std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0F]);
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "hex string has odd length");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::kInvalidArgument, "invalid hex digit");
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

std::uint16_t crc16_ccitt(std::span<const std::uint8_t> data) {
  std::uint16_t crc = 0xFFFF;
  for (auto byte : data) {
    crc ^= static_cast<std::uint16_t>(byte) << 8;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                           : static_cast<std::uint16_t>(crc << 1);
    }
  }
  return crc;
}

void append_crc16(Bytes& data) {
  auto crc = crc16_ccitt(data);
  data.push_back(static_cast<std::uint8_t>(crc & 0xFF));
  data.push_back(static_cast<std::uint8_t>(crc >> 8));
}

bool check_crc16(std::span<const std::uint8_t> framed) {
  if (framed.size() < 2) return false;
  auto body = framed.first(framed.size() - 2);
  auto crc = crc16_ccitt(body);
  return framed[framed.size() - 2] == (crc & 0xFF) &&
         framed[framed.size() - 1] == (crc >> 8);
}

}  // namespace rfq
