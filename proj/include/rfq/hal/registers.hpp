#pragma once

#include <cstdint>
#include <vector>

#include "rfq/hal/modem_config.hpp"

namespace rfq::hal {

class RegisterFile {
 public:
  explicit RegisterFile(std::size_t size) : regs_(size, 0) {}

  std::size_t size() const { return regs_.size(); }
  std::uint8_t read(std::uint8_t addr) const;
  void write(std::uint8_t addr, std::uint8_t value);
  const std::vector<std::uint8_t>& raw() const { return regs_; }

 private:
  std::vector<std::uint8_t> regs_;
};

/// Documented address map for the config-mapped registers of a frontend.
///
/// VC1101 (48 registers):
///   0x04-0x07 SYNC[0..3]   sync word bytes, left aligned
///   0x08      SYNCLEN      sync word length (0-4)
///   0x0C-0x0F FREQ         carrier in Hz, u32 big-endian
///   0x10-0x12 DRATE        bitrate in 1/16 bps, u24 big-endian
///   0x13      CHANBW       index into the filter list (0 = widest)
///
/// VNRF24 (32 registers):
///   0x03      SETUP_AW     address (sync word) width, 3-5 bytes
///   0x05      RF_CH        carrier - 2400 MHz, in MHz
///   0x06      RF_SETUP     0 = 1 Mbps, 1 = 2 Mbps, 2 = 250 kbps
///   0x0A-0x0E RX_ADDR      address bytes, left aligned
///   0x1D      BW           index into the filter list
class RegisterMap {
 public:
  virtual ~RegisterMap() = default;

  virtual bool is_mapped(std::uint8_t addr) const = 0;
  /// Writes every mapped register from `cfg`.
  virtual void encode(const ModemConfig& cfg, RegisterFile& regs) const = 0;
  /// Decodes the mapped registers into a patch (carrier, bitrate, bandwidth,
  /// sync word). Throws on values outside the register encoding.
  virtual ModemConfigPatch decode(const RegisterFile& regs) const = 0;
};

class Vc1101RegisterMap : public RegisterMap {
 public:
  explicit Vc1101RegisterMap(std::vector<Hertz> filters) : filters_(std::move(filters)) {}
  bool is_mapped(std::uint8_t addr) const override;
  void encode(const ModemConfig& cfg, RegisterFile& regs) const override;
  ModemConfigPatch decode(const RegisterFile& regs) const override;

 private:
  std::vector<Hertz> filters_;
};

class Vnrf24RegisterMap : public RegisterMap {
 public:
  explicit Vnrf24RegisterMap(std::vector<Hertz> filters) : filters_(std::move(filters)) {}
  bool is_mapped(std::uint8_t addr) const override;
  void encode(const ModemConfig& cfg, RegisterFile& regs) const override;
  ModemConfigPatch decode(const RegisterFile& regs) const override;

 private:
  std::vector<Hertz> filters_;
};

}  // namespace rfq::hal
