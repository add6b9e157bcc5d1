#include "rfq/hal/modem_config.hpp"

namespace rfq::hal {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kIdle: return "IDLE";
    case Mode::kRx: return "RX";
    case Mode::kTx: return "TX";
    case Mode::kPromiscuous: return "PROMISCUOUS";
    case Mode::kJam: return "JAM";
  }
  return "IDLE";
}

Mode mode_from_string(const std::string& s) {
  if (s == "IDLE") return Mode::kIdle;
  if (s == "RX") return Mode::kRx;
  if (s == "TX") return Mode::kTx;
  if (s == "PROMISCUOUS") return Mode::kPromiscuous;
  if (s == "JAM") return Mode::kJam;
  throw Error(ErrorCode::kInvalidArgument, "unknown mode: " + s);
}

bool ModemConfigPatch::empty() const {
  return !carrier_freq && !bit_rate && !freq_dev && !rx_bandwidth && !modulation &&
         !tx_power && !is_promiscuous && !sync_word && !preamble_len && !packet_len &&
         !crc_enabled;
}

const std::vector<std::string>& modem_field_names() {
  static const std::vector<std::string> names{
      "carrierFreq", "bitRate",    "freqDev",       "rxBandwidth",
      "modulation",  "txPower",    "isPromiscuous", "syncWord",
      "preambleLen", "isFixedPacketLen", "packetLen", "crcEnabled"};
  return names;
}

FrontendProfile vc1101_profile() {
  FrontendProfile p;
  p.name = "VC1101";
  p.band_lo = 300e6;
  p.band_hi = 928e6;
  p.freq_step = 1;
  p.filter_widths = {812e3, 650e3, 541e3, 464e3, 406e3, 325e3, 270e3, 232e3,
                     203e3, 162e3, 135e3, 116e3, 102e3, 81e3,  68e3,  58e3};
  p.max_bitrate = 500e3;
  p.bitrate_step = 1.0 / 16.0;
  p.fifo_bytes = 64;
  p.max_packet_len = 64;
  p.min_sync_len = 0;
  p.max_sync_len = 4;
  p.register_count = 0x30;
  p.cal_bin = 100e3;
  p.timing = {75, 712, 320, 600};
  p.defaults = ModemConfig{};
  return p;
}

FrontendProfile vnrf24_profile() {
  FrontendProfile p;
  p.name = "VNRF24";
  p.band_lo = 2400e6;
  p.band_hi = 2525e6;
  p.freq_step = 1e6;
  p.filter_widths = {2e6, 1e6};
  p.max_bitrate = 2e6;
  p.allowed_bitrates = {250e3, 1e6, 2e6};
  p.bitrate_step = 1;
  p.fifo_bytes = 32;
  p.max_packet_len = 32;
  p.min_sync_len = 3;
  p.max_sync_len = 5;
  p.register_count = 0x20;
  p.cal_bin = 1e6;
  p.timing = {130, 0, 50, 170};
  ModemConfig d;
  d.carrier_freq = 2402e6;
  d.bit_rate = 2e6;
  d.freq_dev = 0;
  d.rx_bandwidth = 2e6;
  d.tx_power = -18;
  d.sync_word = {0xE7, 0xE7, 0xE7, 0xE7, 0xE7};
  d.preamble_len = 8;
  d.packet_len = {true, 32};
  d.crc_enabled = true;
  p.defaults = d;
  return p;
}

}  // namespace rfq::hal
