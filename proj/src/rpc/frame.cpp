#include "rfq/rpc/frame.hpp"

#include <algorithm>

#include <json.hpp>

namespace rfq::rpc {

Bytes encode_frame(std::string_view topic, std::string_view payload) {
  std::size_t total = kHeaderBytes + topic.size() + payload.size();
  if (topic.size() > 0xFFFF || total > kMaxFrameBytes) {
    throw Error(ErrorCode::kFraming, "frame of " + std::to_string(total) + " bytes exceeds the 64 KiB cap");
  }
  Bytes out;
  out.reserve(total);
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(static_cast<std::uint8_t>(topic.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(topic.size()));
  out.insert(out.end(), topic.begin(), topic.end());
  auto n = static_cast<std::uint32_t>(payload.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(n >> shift));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

bool plausible_topic(std::string_view topic) {
  if (!(topic.starts_with("rfquack/in/") || topic.starts_with("rfquack/out/"))) return false;
  return std::all_of(topic.begin(), topic.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u > 0x20 && u < 0x7F;
  });
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }

void FrameDecoder::feed(std::string_view bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }

FrameDecoder::Probe FrameDecoder::probe(std::size_t at, std::size_t& frame_len, std::string& why) const {
  std::size_t avail = buf_.size() - at;
  if (avail < 4) return Probe::kIncomplete;
  std::size_t topic_len = (std::size_t{buf_[at + 2]} << 8) | buf_[at + 3];
  if (topic_len == 0 || kHeaderBytes + topic_len > kMaxFrameBytes) {
    why = "bad topic length";
    return Probe::kInvalid;
  }
  // Reject a bad topic as soon as its first bytes are visible.
  std::string topic;
  for (std::size_t i = 0; i < std::min(topic_len, avail - 4); ++i) topic.push_back(static_cast<char>(buf_[at + 4 + i]));
  std::string_view prefix = topic.size() < 8 ? std::string_view(topic) : std::string_view(topic).substr(0, 8);
  if (std::string_view("rfquack/").substr(0, prefix.size()) != prefix) {
    why = "bad topic";
    return Probe::kInvalid;
  }
  if (avail < 4 + topic_len + 4) return Probe::kIncomplete;
  if (!plausible_topic(topic)) {
    why = "bad topic";
    return Probe::kInvalid;
  }
  std::size_t p = at + 4 + topic_len;
  std::size_t payload_len = 0;
  for (int i = 0; i < 4; ++i) payload_len = (payload_len << 8) | buf_[p + static_cast<std::size_t>(i)];
  frame_len = kHeaderBytes + topic_len + payload_len;
  if (frame_len > kMaxFrameBytes) {
    why = "oversized frame (" + std::to_string(frame_len) + " bytes)";
    return Probe::kInvalid;
  }
  if (avail < frame_len) return Probe::kIncomplete;
  auto first = buf_.begin() + static_cast<std::ptrdiff_t>(p + 4);
  if (!nlohmann::json::accept(first, first + static_cast<std::ptrdiff_t>(payload_len))) {
    why = "payload is not a JSON document";
    return Probe::kInvalid;
  }
  return Probe::kValid;
}

RawFrame FrameDecoder::extract(std::size_t at) const {
  std::size_t topic_len = (std::size_t{buf_[at + 2]} << 8) | buf_[at + 3];
  RawFrame f;
  auto t = buf_.begin() + static_cast<std::ptrdiff_t>(at + 4);
  f.topic.assign(t, t + static_cast<std::ptrdiff_t>(topic_len));
  std::size_t p = at + 4 + topic_len;
  std::size_t payload_len = 0;
  for (int i = 0; i < 4; ++i) payload_len = (payload_len << 8) | buf_[p + static_cast<std::size_t>(i)];
  auto b = buf_.begin() + static_cast<std::ptrdiff_t>(p + 4);
  f.payload.assign(b, b + static_cast<std::ptrdiff_t>(payload_len));
  return f;
}

DecodeResult FrameDecoder::fail(std::size_t drop, std::string why) {
  ++errors_;
  buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(std::min(drop, buf_.size())));
  return {std::nullopt, std::move(why)};
}

std::optional<DecodeResult> FrameDecoder::next() {
  auto find_magic = [&](std::size_t from) {
    for (std::size_t i = from; i + 1 < buf_.size(); ++i) {
      if (buf_[i] == kMagic0 && buf_[i + 1] == kMagic1) return i;
    }
    return buf_.size() - (buf_.empty() || buf_.back() != kMagic0 ? 0 : 1);
  };

  std::size_t start = find_magic(0);
  if (start > 0) return fail(start, "garbage before magic (" + std::to_string(start) + " bytes)");
  if (buf_.size() < 2) return std::nullopt;

  std::size_t len = 0;
  std::string why;
  switch (probe(0, len, why)) {
    case Probe::kValid: {
      auto f = extract(0);
      buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(len));
      return DecodeResult{std::move(f), {}};
    }
    case Probe::kInvalid:
      return fail(1, why);
    case Probe::kIncomplete:
      break;
  }
  for (std::size_t at = find_magic(1); at + 1 < buf_.size(); at = find_magic(at + 1)) {
    std::size_t inner = 0;
    std::string ignored;
    if (probe(at, inner, ignored) == Probe::kValid) return fail(at, "truncated frame");
  }
  return std::nullopt;
}

std::optional<DecodeResult> FrameDecoder::finish() {
  if (auto r = next()) return r;
  if (buf_.empty()) return std::nullopt;
  return fail(buf_.size(), "truncated frame at end of stream");
}

}  // namespace rfq::rpc
