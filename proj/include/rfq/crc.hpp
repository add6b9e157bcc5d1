#pragma once

#include <cstdint>
#include <span>

#include "rfq/common.hpp"

namespace rfq {

// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no xorout.
std::uint16_t crc16_ccitt(std::span<const std::uint8_t> data);

// Appends the CRC of `data` little-endian.
void append_crc16(Bytes& data);

// True when the last two bytes are the little-endian CRC of the rest.
bool check_crc16(std::span<const std::uint8_t> framed);

}  // namespace rfq
