#pragma once

#include <string>

#include "rfq/common.hpp"

namespace rfq::hal {

struct Packet {
  Bytes data;
  std::string rx_radio;
  Hertz carrier_freq = 0;
  BitsPerSecond bit_rate = 0;
  Dbm rssi = 0;
  std::int64_t millis = 0;
  Micros timestamp_us = 0;

  bool operator==(const Packet&) const = default;
};

}  // namespace rfq::hal
