#include "rfq/modules/radio_module.hpp"

#include "rfq/pipeline/json_codec.hpp"

namespace rfq::modules {

using pipeline::FieldSpec;
using pipeline::FieldType;
using pipeline::Json;

void RadioModule::on_init(pipeline::Node& node) { node.radios().add(name(), profile_); }

Json RadioModule::status(pipeline::Node& node) const {
  const auto& r = node.radios().at(name());
  const auto& s = r.stats();
  return {{"name", name()},
          {"chip", r.profile().name},
          {"mode", hal::to_string(r.mode())},
          {"config", pipeline::to_json(r.config())},
          {"stats",
           {{"rxPackets", s.rx_packets},
            {"txPackets", s.tx_packets},
            {"crcErrors", s.crc_errors},
            {"retunes", s.retunes},
            {"calibrations", s.calibrations},
            {"rssiReads", s.rssi_reads}}}};
}

namespace {

std::uint8_t address_arg(const Json& args) {
  auto a = args.at("address").get<long long>();
  if (a < 0 || a > 0xFF) throw Error(ErrorCode::kOutOfRange, "register address out of range");
  return static_cast<std::uint8_t>(a);
}

}  // namespace

Json RadioModule::on_user_command(pipeline::Node& node, const std::string& verb,
                                  const Json& args) {
  auto& radio = node.radios().at(name());
  if (verb == "set_modem_config" || verb == "set_packet_len") {
    auto applied = radio.set_modem_config(pipeline::patch_from_json(args, radio.config()));
    return {{"applied", applied}};
  }
  if (verb == "get_modem_config") return pipeline::to_json(radio.config());
  if (verb == "set_register") {
    auto addr = address_arg(args);
    auto v = args.at("value").get<long long>();
    if (v < 0 || v > 0xFF) throw Error(ErrorCode::kOutOfRange, "register value out of range");
    radio.set_register(addr, static_cast<std::uint8_t>(v));
    return {{"address", addr}, {"value", radio.get_register(addr)}};
  }
  if (verb == "get_register") {
    auto addr = address_arg(args);
    return {{"address", addr}, {"value", radio.get_register(addr)}};
  }
  if (verb == "set_mode") {
    radio.set_mode(hal::mode_from_string(args.at("mode").get<std::string>()));
    return {{"mode", hal::to_string(radio.mode())}};
  }
  if (verb == "rx" || verb == "tx" || verb == "idle" || verb == "jam") {
    static const std::map<std::string, hal::Mode> modes{{"rx", hal::Mode::kRx},
                                                        {"tx", hal::Mode::kTx},
                                                        {"idle", hal::Mode::kIdle},
                                                        {"jam", hal::Mode::kJam}};
    radio.set_mode(modes.at(verb));
    return {{"mode", hal::to_string(radio.mode())}};
  }
  if (verb == "send") {
    auto data = from_hex(args.at("data").get<std::string>());
    int repeat = args.value("repeat", 1);
    auto ids = radio.transmit(data, repeat);
    return {{"repeat", repeat}, {"emissions", ids.size()}};
  }
  if (verb == "read_rssi") return {{"rssi", radio.read_rssi()}};
  if (verb == "status") return status(node);
  return Module::on_user_command(node, verb, args);
}

pipeline::ModuleSchema RadioModule::schema() const {
  std::vector<std::string> modes{"IDLE", "RX", "TX", "PROMISCUOUS", "JAM"};
  pipeline::ModuleSchema s{name(), {}, {}};
  s.commands = {
      {"set_modem_config", pipeline::modem_config_fields()},
      {"get_modem_config", {}},
      {"set_packet_len",
       {{"isFixedPacketLen", FieldType::kBool, true}, {"packetLen", FieldType::kInt, true}}},
      {"set_register", {{"address", FieldType::kInt}, {"value", FieldType::kInt}}},
      {"get_register", {{"address", FieldType::kInt}}},
      {"set_mode", {{"mode", FieldType::kEnum, false, modes}}},
      {"rx", {}},
      {"tx", {}},
      {"idle", {}},
      {"jam", {}},
      {"send", {{"data", FieldType::kHex}, {"repeat", FieldType::kInt, true}}},
      {"read_rssi", {}},
      {"status", {}},
  };
  s.events = {{"packet", pipeline::packet_fields()}};
  return s;
}

}  // namespace rfq::modules
