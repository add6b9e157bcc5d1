#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "rfq/env/channel.hpp"
#include "rfq/hal/modem_config.hpp"

namespace rfq::hal {

class BitSink {
 public:
  virtual ~BitSink() = default;
  virtual void on_bit(bool bit) = 0;
  /// Called once each time the line goes quiet.
  virtual void on_idle() = 0;
  /// While true the clock keeps sampling through long zero runs instead of
  /// declaring the line idle.
  virtual bool holds_clock() const { return false; }
};

/// Edge-resynchronizing bit clock. Every level change re-anchors the
/// sampling phase; bits are sampled at anchor + (k + 1/2)/rate, so a run of
/// duration D yields round(D * rate) bits. After `kIdleBits` zero bits the
/// line is declared idle and no more bits are produced until the next edge.
class ClockRecovery {
 public:
  static constexpr std::size_t kIdleBits = 16;

  void reset(double t);
  double cursor() const { return cursor_; }

  void run(const env::RfEnvironment& env, Hertz tuned, Hertz bandwidth, BitsPerSecond rate,
           double now, BitSink& sink);

 private:
  void emit(double seg_end, BitSink& sink, double period);

  double cursor_ = 0;
  double anchor_ = 0;
  std::size_t k_ = 0;
  std::size_t zeros_ = 0;
  bool level_ = false;
  bool idle_ = true;
  bool initialized_ = false;
};

/// Preamble + sync detection, optional length byte, optional CRC. A sync
/// match only counts when at least `kPreambleQualifier` alternating bits
/// precede it. An empty sync word never matches.
class PacketFramer : public BitSink {
 public:
  struct Frame {
    Bytes data;
    bool crc_ok = true;
  };

  static constexpr std::size_t kPreambleQualifier = 4;

  explicit PacketFramer(const ModemConfig& cfg, std::size_t max_len);

  void on_bit(bool bit) override;
  void on_idle() override;
  bool holds_clock() const override { return in_packet_; }

  std::vector<Frame> take() { return std::exchange(frames_, {}); }

 private:
  void finish();

  std::vector<bool> sync_bits_;
  PacketLength packet_len_;
  bool crc_ = true;
  std::size_t max_len_ = 64;

  std::deque<bool> history_;
  bool in_packet_ = false;
  std::optional<std::size_t> expected_;  // body bytes, CRC excluded
  Bytes body_;
  std::uint8_t acc_ = 0;
  int acc_bits_ = 0;
  std::vector<Frame> frames_;
};

/// Promiscuous capture: everything after the first on-symbol, chunked to
/// `chunk_len` bytes; a partial chunk is flushed (trailing silence trimmed)
/// when the line goes idle.
class RawFramer : public BitSink {
 public:
  explicit RawFramer(std::size_t chunk_len) : chunk_len_(chunk_len) {}

  void on_bit(bool bit) override;
  void on_idle() override;

  std::vector<Bytes> take() { return std::exchange(chunks_, {}); }

 private:
  std::size_t chunk_len_;
  bool capturing_ = false;
  std::vector<bool> bits_;
  std::size_t last_one_ = 0;  // bit count up to and including the last 1
  std::vector<Bytes> chunks_;
};

Bytes pack_bits(const std::vector<bool>& bits, std::size_t nbits);

}  // namespace rfq::hal
