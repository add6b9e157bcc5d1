#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>

#include "rfq/common.hpp"

namespace rfq::rpc {

inline constexpr std::uint8_t kMagic0 = 0x52;  // 'R'
inline constexpr std::uint8_t kMagic1 = 0x51;  // 'Q'
inline constexpr std::size_t kHeaderBytes = 8;
inline constexpr std::size_t kMaxFrameBytes = 64 * 1024;

/// magic "RQ", u16 BE topic length, topic, u32 BE payload length, payload.
/// Throws kFraming when the result would exceed kMaxFrameBytes.
Bytes encode_frame(std::string_view topic, std::string_view payload);

struct RawFrame {
  std::string topic;
  std::string payload;
};

/// One decoder output: a frame, or a framing error after which the decoder
/// has already skipped ahead to the next candidate magic.
struct DecodeResult {
  std::optional<RawFrame> frame;
  std::string error;

  bool ok() const { return frame.has_value(); }
};

/// Incremental stream decoder. A frame is accepted only when its topic is a
/// plausible rfquack/in|out topic and its payload parses as a JSON document;
/// anything else is a framing error and the scan resumes one byte after the
/// rejected magic. An incomplete frame is abandoned as truncated as soon as
/// a complete, valid frame starts inside it.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  void feed(std::string_view bytes);

  std::optional<DecodeResult> next();

  /// Reports whatever is left in the buffer as truncated.
  std::optional<DecodeResult> finish();

  std::size_t buffered() const { return buf_.size(); }
  std::uint64_t errors() const { return errors_; }

 private:
  enum class Probe { kIncomplete, kValid, kInvalid };
  Probe probe(std::size_t at, std::size_t& frame_len, std::string& why) const;
  RawFrame extract(std::size_t at) const;
  DecodeResult fail(std::size_t drop, std::string why);

  std::deque<std::uint8_t> buf_;
  std::uint64_t errors_ = 0;
};

bool plausible_topic(std::string_view topic);

}  // namespace rfq::rpc
