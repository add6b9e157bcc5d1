#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rfq/common.hpp"
#include "rfq/env/emission.hpp"

namespace rfq::hal {

enum class Mode { kIdle, kRx, kTx, kPromiscuous, kJam };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct PacketLength {
  bool fixed = false;
  std::size_t len = 64;  // exact length when fixed, maximum when variable

  bool operator==(const PacketLength&) const = default;
};

/// Tunable physical-layer state of one frontend.
struct ModemConfig {
  Hertz carrier_freq = 433.92e6;
  BitsPerSecond bit_rate = 4800;
  Hertz freq_dev = 48e3;  // stored only; OOK ignores it
  Hertz rx_bandwidth = 325e3;
  env::Modulation modulation = env::Modulation::kOok;
  Dbm tx_power = -40;
  bool is_promiscuous = false;
  Bytes sync_word{0xD3, 0x91};
  int preamble_len = 32;
  PacketLength packet_len{};
  bool crc_enabled = true;

  bool operator==(const ModemConfig&) const = default;
};

/// Partial update. Unset fields are left untouched.
struct ModemConfigPatch {
  std::optional<Hertz> carrier_freq;
  std::optional<BitsPerSecond> bit_rate;
  std::optional<Hertz> freq_dev;
  std::optional<Hertz> rx_bandwidth;
  std::optional<env::Modulation> modulation;
  std::optional<Dbm> tx_power;
  std::optional<bool> is_promiscuous;
  std::optional<Bytes> sync_word;
  std::optional<int> preamble_len;
  std::optional<PacketLength> packet_len;
  std::optional<bool> crc_enabled;

  bool empty() const;
};

/// Wire names of the config fields, in declaration order.
const std::vector<std::string>& modem_field_names();

struct TimingModel {
  Micros t_hop = 75;
  Micros t_cal = 712;
  Micros t_driver = 320;
  Micros t_rssi = 600;

  /// Cost of a retune plus one stable RSSI read with the calibration cached.
  Micros t_tune_cached() const { return t_hop + t_driver + t_rssi; }
};

struct FrontendProfile {
  std::string name;
  Hertz band_lo = 0;
  Hertz band_hi = 0;
  Hertz freq_step = 1;  // carrier grid
  std::vector<Hertz> filter_widths;  // sorted descending
  BitsPerSecond max_bitrate = 0;
  std::vector<BitsPerSecond> allowed_bitrates;  // empty: continuous up to max
  double bitrate_step = 1.0 / 16.0;
  std::size_t fifo_bytes = 64;
  std::size_t max_packet_len = 64;
  std::size_t min_sync_len = 0;
  std::size_t max_sync_len = 4;
  Dbm min_tx_power = -70;
  Dbm max_tx_power = 12;
  std::size_t register_count = 0;
  Hertz cal_bin = 100e3;
  TimingModel timing;
  ModemConfig defaults;

  Hertz widest_filter() const { return filter_widths.front(); }
  Hertz narrowest_filter() const { return filter_widths.back(); }
};

/// Sub-GHz OOK frontend: 300-928 MHz, 812 kHz .. 58 kHz filters, 64-byte FIFO.
FrontendProfile vc1101_profile();

/// 2.4 GHz frontend: 2400-2525 MHz on a 1 MHz grid, 250k/1M/2M only.
FrontendProfile vnrf24_profile();

}  // namespace rfq::hal
