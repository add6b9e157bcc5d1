#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

#include "rfq/common.hpp"

namespace rfq::env {

enum class Modulation { kOok };

/// One scheduled transmission on the simulated channel.
///
/// On-air bit layout per repeat: `preamble_len` alternating bits starting
/// with 1, then the sync word, then `payload` (MSB first). Continuous
/// emissions (jammers) hold the carrier on from `start_time` until
/// cancelled and carry no bits.
struct Emission {
  std::string source;
  Hertz carrier = 0;
  BitsPerSecond bitrate = 1;
  Dbm power = 0;
  Modulation modulation = Modulation::kOok;
  int preamble_len = 0;
  Bytes sync_word;
  Bytes payload;
  Micros start_time = 0;
  int repeat_count = 1;
  Micros inter_repeat_gap = 0;
  bool continuous = false;
  Micros cancel_time = std::numeric_limits<Micros>::max();

  std::size_t bit_count() const {
    return static_cast<std::size_t>(preamble_len) +
           8 * (sync_word.size() + payload.size());
  }

  bool bit(std::size_t index) const;

  double repeat_duration_us() const {
    return static_cast<double>(bit_count()) * 1e6 / bitrate;
  }

  double repeat_start_us(int k) const {
    return static_cast<double>(start_time) +
           k * (repeat_duration_us() + static_cast<double>(inter_repeat_gap));
  }

  /// End of the last repeat (or the cancel time for continuous carriers).
  double end_us() const;

  /// On-air state at `t`: true iff a 1 symbol (or a continuous carrier) is
  /// being transmitted.
  bool on_at(double t) const;

  /// True when some repeat is on air at `t`, regardless of the symbol.
  bool active_at(double t) const;
};

}  // namespace rfq::env
