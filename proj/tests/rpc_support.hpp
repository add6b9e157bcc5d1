#pragma once

// Random message generators and decoding helpers shared by the RPC tests
// and the acceptance runner.

#include <random>
#include <string>
#include <vector>

#include "rfq/common.hpp"
#include "rfq/pipeline/schema.hpp"
#include "rfq/rpc/frame.hpp"

namespace rfq::testing {

using pipeline::FieldType;
using pipeline::Json;
using rpc::FrameDecoder;
using rpc::RawFrame;

inline std::vector<RawFrame> decode_all(FrameDecoder& dec, std::vector<std::string>* errors = nullptr) {
  std::vector<RawFrame> out;
  while (auto r = dec.next()) {
    if (r->ok()) {
      out.push_back(*r->frame);
    } else if (errors) {
      errors->push_back(r->error);
    }
  }
  return out;
}

inline Json random_value(std::mt19937_64& rng, const pipeline::FieldSpec& f, FieldType type, int depth = 0);

inline Json random_scalar(std::mt19937_64& rng, FieldType type) {
  switch (type) {
    case FieldType::kBool: return rng() % 2 == 0;
    case FieldType::kInt: return static_cast<std::int64_t>(rng() % (1ull << 40)) - (1ll << 39);
    case FieldType::kNumber: return std::uniform_real_distribution<double>(-1e9, 1e9)(rng);
    case FieldType::kHex: {
      Bytes b(rng() % 40);
      for (auto& x : b) x = static_cast<std::uint8_t>(rng());
      return to_hex(b);
    }
    default: {
      static const std::vector<std::string> pieces{"a", "Z", "0", " ", "/", "\"", "\\", "\n", "\xc3\xa9", "{", "RQ"};
      std::string s;
      for (std::size_t i = rng() % 12; i > 0; --i) s += pieces[rng() % pieces.size()];
      return s;
    }
  }
}

inline Json random_value(std::mt19937_64& rng, const pipeline::FieldSpec& f, FieldType type, int depth) {
  switch (type) {
    case FieldType::kEnum: return f.values.at(rng() % f.values.size());
    case FieldType::kArray: {
      Json a = Json::array();
      for (std::size_t i = rng() % 4; i > 0; --i) a.push_back(random_value(rng, f, f.item, depth + 1));
      return a;
    }
    case FieldType::kObject: {
      Json o = Json::object();
      for (std::size_t i = rng() % 3; i > 0; --i) {
        auto kind = static_cast<FieldType>(rng() % 5);
        o["k" + std::to_string(rng() % 100)] =
            depth < 2 && rng() % 4 == 0 ? random_value(rng, f, FieldType::kObject, depth + 1)
                                        : random_scalar(rng, kind);
      }
      return o;
    }
    default: return random_scalar(rng, type);
  }
}

inline Json random_payload(std::mt19937_64& rng, const pipeline::MessageSpec& spec) {
  Json p = Json::object();
  for (const auto& f : spec.fields) {
    if (f.optional && rng() % 2 == 0) continue;
    p[f.name] = random_value(rng, f, f.type);
  }
  return p;
}

/// A concatenation of frames with noise injected before roughly a third of
/// them: random bytes, a cut-off copy of some frame, or a magic followed by
/// junk.
struct NoisyStream {
  Bytes bytes;
  std::vector<bool> after_garbage;
  int injections = 0;
};

inline NoisyStream inject_garbage(const std::vector<Bytes>& frames, std::mt19937_64& rng) {
  NoisyStream out;
  out.after_garbage.assign(frames.size(), false);
  auto& stream = out.bytes;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (rng() % 3 == 0) {
      ++out.injections;
      out.after_garbage[i] = true;
      std::size_t kind = rng() % 3;
      if (kind == 0) {
        for (std::size_t n = 1 + rng() % 30; n > 0; --n) stream.push_back(static_cast<std::uint8_t>(rng()));
      } else if (kind == 1) {
        Bytes partial = frames[rng() % frames.size()];
        partial.resize(1 + rng() % (partial.size() - 1));
        stream.insert(stream.end(), partial.begin(), partial.end());
      } else {
        stream.push_back(rpc::kMagic0);
        stream.push_back(rpc::kMagic1);
        for (std::size_t n = rng() % 12; n > 0; --n) stream.push_back(static_cast<std::uint8_t>(rng()));
      }
    }
    stream.insert(stream.end(), frames[i].begin(), frames[i].end());
  }
  return out;
}

/// Feeds `bytes` in random-sized chunks and returns every decoded frame.
inline std::vector<RawFrame> decode_chunked(const Bytes& bytes, std::mt19937_64& rng) {
  FrameDecoder dec;
  std::vector<RawFrame> got;
  for (std::size_t pos = 0; pos < bytes.size();) {
    std::size_t n = std::min<std::size_t>(1 + rng() % 64, bytes.size() - pos);
    dec.feed(std::span<const std::uint8_t>(bytes.data() + pos, n));
    pos += n;
    auto part = decode_all(dec);
    got.insert(got.end(), part.begin(), part.end());
  }
  while (auto r = dec.finish()) {
    if (r->ok()) got.push_back(*r->frame);
  }
  return got;
}

}  // namespace rfq::testing
