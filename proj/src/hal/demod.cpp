#include "rfq/hal/demod.hpp"

#include "rfq/crc.hpp"

namespace rfq::hal {

void ClockRecovery::reset(double t) {
  cursor_ = t;
  anchor_ = t;
  k_ = 0;
  zeros_ = 0;
  level_ = false;
  idle_ = true;
  initialized_ = false;
}

void ClockRecovery::emit(double seg_end, BitSink& sink, double period) {
  while (!idle_) {
    double t = anchor_ + (static_cast<double>(k_) + 0.5) * period;
    if (t >= seg_end) return;
    ++k_;
    sink.on_bit(level_);
    zeros_ = level_ ? 0 : zeros_ + 1;
    if (zeros_ >= kIdleBits && !sink.holds_clock()) {
      idle_ = true;
      zeros_ = 0;
      sink.on_idle();
    }
  }
}

void ClockRecovery::run(const env::RfEnvironment& env, Hertz tuned, Hertz bandwidth,
                        BitsPerSecond rate, double now, BitSink& sink) {
  if (!(rate > 0)) throw Error(ErrorCode::kInvalidArgument, "bitrate must be positive");
  if (now <= cursor_) return;
  double period = 1e6 / rate;
  auto tr = env.transitions(tuned, bandwidth, cursor_, now);
  if (!initialized_ || tr.front().level != level_) {
    initialized_ = true;
    level_ = tr.front().level;
    anchor_ = cursor_;
    k_ = 0;
    zeros_ = 0;
    idle_ = !level_;
  }
  for (std::size_t i = 1; i < tr.size(); ++i) {
    emit(tr[i].at, sink, period);
    level_ = tr[i].level;
    anchor_ = tr[i].at;
    k_ = 0;
    idle_ = false;
  }
  emit(now, sink, period);
  cursor_ = now;
}

Bytes pack_bits(const std::vector<bool>& bits, std::size_t nbits) {
  Bytes out((nbits + 7) / 8, 0);
  for (std::size_t i = 0; i < nbits && i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80 >> (i % 8));
  }
  return out;
}

PacketFramer::PacketFramer(const ModemConfig& cfg, std::size_t max_len)
    : packet_len_(cfg.packet_len), crc_(cfg.crc_enabled), max_len_(max_len) {
  for (auto byte : cfg.sync_word) {
    for (int b = 7; b >= 0; --b) sync_bits_.push_back((byte >> b) & 1);
  }
}

void PacketFramer::on_bit(bool bit) {
  if (!in_packet_) {
    if (sync_bits_.empty()) return;
    history_.push_back(bit);
    std::size_t want = sync_bits_.size() + kPreambleQualifier;
    while (history_.size() > want) history_.pop_front();
    if (history_.size() < want) return;
    for (std::size_t i = 0; i + 1 < kPreambleQualifier; ++i) {
      if (history_[i] == history_[i + 1]) return;
    }
    for (std::size_t i = 0; i < sync_bits_.size(); ++i) {
      if (history_[kPreambleQualifier + i] != sync_bits_[i]) return;
    }
    in_packet_ = true;
    history_.clear();
    body_.clear();
    acc_ = 0;
    acc_bits_ = 0;
    expected_.reset();
    if (packet_len_.fixed) expected_ = packet_len_.len;
    return;
  }

  acc_ = static_cast<std::uint8_t>((acc_ << 1) | (bit ? 1 : 0));
  if (++acc_bits_ < 8) return;
  std::uint8_t byte = acc_;
  acc_ = 0;
  acc_bits_ = 0;
  body_.push_back(byte);
  if (!expected_) {
    if (byte > packet_len_.len || byte > max_len_) {
      in_packet_ = false;
      body_.clear();
      return;
    }
    expected_ = byte + 1;  // length byte is kept in body_ until finish()
  }
  std::size_t total = *expected_ + (crc_ ? 2 : 0);
  if (body_.size() >= total) finish();
}

void PacketFramer::finish() {
  Frame f;
  f.crc_ok = !crc_ || check_crc16(body_);
  std::size_t end = body_.size() - (crc_ ? 2 : 0);
  std::size_t begin = packet_len_.fixed ? 0 : 1;
  f.data.assign(body_.begin() + static_cast<std::ptrdiff_t>(begin),
                body_.begin() + static_cast<std::ptrdiff_t>(end));
  frames_.push_back(std::move(f));
  in_packet_ = false;
  body_.clear();
  expected_.reset();
}

void PacketFramer::on_idle() {
  in_packet_ = false;
  body_.clear();
  expected_.reset();
  history_.clear();
}

void RawFramer::on_bit(bool bit) {
  if (!capturing_) {
    if (!bit) return;
    capturing_ = true;
    bits_.clear();
    last_one_ = 0;
  }
  bits_.push_back(bit);
  if (bit) last_one_ = bits_.size();
  if (bits_.size() == chunk_len_ * 8) {
    chunks_.push_back(pack_bits(bits_, bits_.size()));
    bits_.clear();
    last_one_ = 0;
  }
}

void RawFramer::on_idle() {
  if (capturing_ && last_one_ > 0) {
    chunks_.push_back(pack_bits(bits_, (last_one_ + 7) / 8 * 8));
  }
  capturing_ = false;
  bits_.clear();
  last_one_ = 0;
}

}  // namespace rfq::hal
