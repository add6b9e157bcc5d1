#include "rfq/modules/repeater.hpp"

namespace rfq::modules {

using pipeline::FieldType;
using pipeline::Json;

void RepeaterModule::after_packet_received(pipeline::Node& node, const hal::Packet& pkt) {
  if (!active_ || pkt.rx_radio == target_) return;
  node.repeater_queue().push(pkt);
}

void RepeaterModule::on_loop(pipeline::Node& node) {
  auto& q = node.repeater_queue();
  while (auto pkt = q.pop()) {
    try {
      node.radios().transmit(target_, pkt->data, count_);
    } catch (const Error& e) {
      node.emit(name(), "error", pipeline::error_payload("repeat", rfq::to_string(e.code()), e.what()));
    }
  }
}

Json RepeaterModule::state() const {
  return {{"enabled", active_}, {"radio", target_}, {"count", count_}};
}

Json RepeaterModule::on_user_command(pipeline::Node& node, const std::string& verb,
                                     const Json& args) {
  if (verb == "configure" || verb == "enable") {
    std::string radio = args.value("radio", target_);
    int count = args.value("count", count_);
    if (!node.radios().contains(radio)) throw Error(ErrorCode::kUnknownRadio, "unknown radio: " + radio);
    if (count < 0) throw Error(ErrorCode::kInvalidArgument, "count must be >= 0");
    target_ = radio;
    count_ = count;
    if (verb == "enable") active_ = true;
    return state();
  }
  if (verb == "disable") {
    active_ = false;
    node.repeater_queue().clear();
    return state();
  }
  return Module::on_user_command(node, verb, args);
}

pipeline::ModuleSchema RepeaterModule::schema() const {
  std::vector<pipeline::FieldSpec> cfg{{"radio", FieldType::kString, true},
                                       {"count", FieldType::kInt, true}};
  return {name(), {{"enable", cfg}, {"disable", {}}, {"configure", cfg}}, {}};
}

}  // namespace rfq::modules
