#include "rfq/pipeline/json_codec.hpp"

namespace rfq::pipeline {

Json to_json(const hal::Packet& p) {
  return {{"data", to_hex(p.data)},         {"rxRadio", p.rx_radio},
          {"carrierFreq", p.carrier_freq},  {"bitRate", p.bit_rate},
          {"rssi", p.rssi},                 {"millis", p.millis},
          {"timestampUs", p.timestamp_us}};
}

hal::Packet packet_from_json(const Json& j) {
  hal::Packet p;
  p.data = from_hex(j.at("data").get<std::string>());
  p.rx_radio = j.value("rxRadio", std::string{});
  p.carrier_freq = j.value("carrierFreq", 0.0);
  p.bit_rate = j.value("bitRate", 0.0);
  p.rssi = j.value("rssi", 0.0);
  p.millis = j.value("millis", std::int64_t{0});
  p.timestamp_us = j.value("timestampUs", Micros{0});
  return p;
}

Json to_json(const hal::ModemConfig& c) {
  return {{"carrierFreq", c.carrier_freq},
          {"bitRate", c.bit_rate},
          {"freqDev", c.freq_dev},
          {"rxBandwidth", c.rx_bandwidth},
          {"modulation", "OOK"},
          {"txPower", c.tx_power},
          {"isPromiscuous", c.is_promiscuous},
          {"syncWord", to_hex(c.sync_word)},
          {"preambleLen", c.preamble_len},
          {"isFixedPacketLen", c.packet_len.fixed},
          {"packetLen", c.packet_len.len},
          {"crcEnabled", c.crc_enabled}};
}

hal::ModemConfigPatch patch_from_json(const Json& j, const hal::ModemConfig& current) {
  hal::ModemConfigPatch p;
  if (j.contains("carrierFreq")) p.carrier_freq = j["carrierFreq"].get<double>();
  if (j.contains("bitRate")) p.bit_rate = j["bitRate"].get<double>();
  if (j.contains("freqDev")) p.freq_dev = j["freqDev"].get<double>();
  if (j.contains("rxBandwidth")) p.rx_bandwidth = j["rxBandwidth"].get<double>();
  if (j.contains("modulation")) p.modulation = env::Modulation::kOok;
  if (j.contains("txPower")) p.tx_power = j["txPower"].get<double>();
  if (j.contains("isPromiscuous")) p.is_promiscuous = j["isPromiscuous"].get<bool>();
  if (j.contains("syncWord")) p.sync_word = from_hex(j["syncWord"].get<std::string>());
  if (j.contains("preambleLen")) p.preamble_len = j["preambleLen"].get<int>();
  if (j.contains("isFixedPacketLen") || j.contains("packetLen")) {
    hal::PacketLength len = current.packet_len;
    if (j.contains("isFixedPacketLen")) len.fixed = j["isFixedPacketLen"].get<bool>();
    if (j.contains("packetLen")) {
      auto n = j["packetLen"].get<long long>();
      if (n < 0) throw Error(ErrorCode::kOutOfRange, "packetLen must be positive");
      len.len = static_cast<std::size_t>(n);
    }
    p.packet_len = len;
  }
  if (j.contains("crcEnabled")) p.crc_enabled = j["crcEnabled"].get<bool>();
  return p;
}

std::vector<FieldSpec> modem_config_fields() {
  return {{"carrierFreq", FieldType::kNumber, true},
          {"bitRate", FieldType::kNumber, true},
          {"freqDev", FieldType::kNumber, true},
          {"rxBandwidth", FieldType::kNumber, true},
          {"modulation", FieldType::kEnum, true, {"OOK"}},
          {"txPower", FieldType::kNumber, true},
          {"isPromiscuous", FieldType::kBool, true},
          {"syncWord", FieldType::kHex, true},
          {"preambleLen", FieldType::kInt, true},
          {"isFixedPacketLen", FieldType::kBool, true},
          {"packetLen", FieldType::kInt, true},
          {"crcEnabled", FieldType::kBool, true}};
}

std::vector<FieldSpec> packet_fields() {
  return {{"data", FieldType::kHex},       {"rxRadio", FieldType::kString},
          {"carrierFreq", FieldType::kNumber}, {"bitRate", FieldType::kNumber},
          {"rssi", FieldType::kNumber},    {"millis", FieldType::kInt},
          {"timestampUs", FieldType::kInt}};
}

}  // namespace rfq::pipeline
