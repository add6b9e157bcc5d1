#include "rfq/hal/registers.hpp"

#include <algorithm>
#include <cmath>

namespace rfq::hal {

std::uint8_t RegisterFile::read(std::uint8_t addr) const {
  if (addr >= regs_.size()) {
    throw Error(ErrorCode::kOutOfRange, "register address out of range");
  }
  return regs_[addr];
}

void RegisterFile::write(std::uint8_t addr, std::uint8_t value) {
  if (addr >= regs_.size()) {
    throw Error(ErrorCode::kOutOfRange, "register address out of range");
  }
  regs_[addr] = value;
}

namespace {

std::uint8_t filter_index(const std::vector<Hertz>& filters, Hertz bw) {
  for (std::size_t i = 0; i < filters.size(); ++i) {
    if (std::fabs(filters[i] - bw) < 0.5) return static_cast<std::uint8_t>(i);
  }
  throw Error(ErrorCode::kUnsupported, "bandwidth not in filter set");
}

Hertz filter_at(const std::vector<Hertz>& filters, std::uint8_t idx) {
  if (idx >= filters.size()) {
    throw Error(ErrorCode::kOutOfRange, "filter index out of range");
  }
  return filters[idx];
}

}  // namespace

bool Vc1101RegisterMap::is_mapped(std::uint8_t addr) const {
  return (addr >= 0x04 && addr <= 0x08) || (addr >= 0x0C && addr <= 0x13);
}

void Vc1101RegisterMap::encode(const ModemConfig& cfg, RegisterFile& regs) const {
  for (std::uint8_t i = 0; i < 4; ++i) {
    regs.write(0x04 + i, i < cfg.sync_word.size() ? cfg.sync_word[i] : 0);
  }
  regs.write(0x08, static_cast<std::uint8_t>(cfg.sync_word.size()));
  auto freq = static_cast<std::uint32_t>(std::llround(cfg.carrier_freq));
  for (int i = 0; i < 4; ++i) {
    regs.write(static_cast<std::uint8_t>(0x0C + i), static_cast<std::uint8_t>(freq >> (24 - 8 * i)));
  }
  auto drate = static_cast<std::uint32_t>(std::llround(cfg.bit_rate * 16.0));
  for (int i = 0; i < 3; ++i) {
    regs.write(static_cast<std::uint8_t>(0x10 + i), static_cast<std::uint8_t>(drate >> (16 - 8 * i)));
  }
  regs.write(0x13, filter_index(filters_, cfg.rx_bandwidth));
}

ModemConfigPatch Vc1101RegisterMap::decode(const RegisterFile& regs) const {
  ModemConfigPatch p;
  std::uint8_t len = regs.read(0x08);
  if (len > 4) throw Error(ErrorCode::kOutOfRange, "sync length register out of range");
  Bytes sync;
  for (std::uint8_t i = 0; i < len; ++i) sync.push_back(regs.read(0x04 + i));
  p.sync_word = sync;
  std::uint32_t freq = 0;
  for (int i = 0; i < 4; ++i) freq = (freq << 8) | regs.read(static_cast<std::uint8_t>(0x0C + i));
  p.carrier_freq = static_cast<Hertz>(freq);
  std::uint32_t drate = 0;
  for (int i = 0; i < 3; ++i) drate = (drate << 8) | regs.read(static_cast<std::uint8_t>(0x10 + i));
  p.bit_rate = static_cast<double>(drate) / 16.0;
  p.rx_bandwidth = filter_at(filters_, regs.read(0x13));
  return p;
}

bool Vnrf24RegisterMap::is_mapped(std::uint8_t addr) const {
  return addr == 0x03 || addr == 0x05 || addr == 0x06 || (addr >= 0x0A && addr <= 0x0E) ||
         addr == 0x1D;
}

void Vnrf24RegisterMap::encode(const ModemConfig& cfg, RegisterFile& regs) const {
  regs.write(0x03, static_cast<std::uint8_t>(cfg.sync_word.size()));
  regs.write(0x05, static_cast<std::uint8_t>(std::llround((cfg.carrier_freq - 2400e6) / 1e6)));
  std::uint8_t code = cfg.bit_rate >= 2e6 ? 1 : (cfg.bit_rate >= 1e6 ? 0 : 2);
  regs.write(0x06, code);
  for (std::uint8_t i = 0; i < 5; ++i) {
    regs.write(0x0A + i, i < cfg.sync_word.size() ? cfg.sync_word[i] : 0);
  }
  regs.write(0x1D, filter_index(filters_, cfg.rx_bandwidth));
}

ModemConfigPatch Vnrf24RegisterMap::decode(const RegisterFile& regs) const {
  ModemConfigPatch p;
  std::uint8_t aw = regs.read(0x03);
  if (aw > 5) throw Error(ErrorCode::kOutOfRange, "address width register out of range");
  Bytes sync;
  for (std::uint8_t i = 0; i < aw; ++i) sync.push_back(regs.read(0x0A + i));
  p.sync_word = sync;
  p.carrier_freq = 2400e6 + 1e6 * regs.read(0x05);
  switch (regs.read(0x06)) {
    case 0: p.bit_rate = 1e6; break;
    case 1: p.bit_rate = 2e6; break;
    case 2: p.bit_rate = 250e3; break;
    default: throw Error(ErrorCode::kOutOfRange, "RF_SETUP data rate code out of range");
  }
  p.rx_bandwidth = filter_at(filters_, regs.read(0x1D));
  return p;
}

}  // namespace rfq::hal
