#include "rfq/modules/packet_filter.hpp"

namespace rfq::modules {

using pipeline::FieldType;
using pipeline::Json;

void PacketFilter::add(FilterRule rule) {
  try {
    compiled_.emplace_back(rule.pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kInvalidArgument, "bad pattern '" + rule.pattern + "': " + e.what());
  }
  rules_.push_back(std::move(rule));
}

void PacketFilter::clear() {
  rules_.clear();
  compiled_.clear();
}

bool PacketFilter::accepts(std::span<const std::uint8_t> data) const {
  std::string text = to_hex(data);
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    bool match = std::regex_search(text, compiled_[i]);
    if (match == rules_[i].negate) return false;
  }
  return true;
}

pipeline::Verdict PacketFilterModule::on_packet_received(pipeline::Node&, hal::Packet& pkt) {
  return filter_.accepts(pkt.data) ? pipeline::Verdict::kPass : pipeline::Verdict::kDrop;
}

Json PacketFilterModule::on_user_command(pipeline::Node& node, const std::string& verb,
                                         const Json& args) {
  if (verb == "add") {
    filter_.add({args.at("pattern").get<std::string>(), args.value("negate", false)});
    return {{"rules", filter_.rules().size()}};
  }
  if (verb == "clear") {
    filter_.clear();
    return {{"rules", 0}};
  }
  if (verb == "list") {
    Json rules = Json::array();
    for (const auto& r : filter_.rules()) rules.push_back({{"pattern", r.pattern}, {"negate", r.negate}});
    return {{"rules", rules}};
  }
  return Module::on_user_command(node, verb, args);
}

pipeline::ModuleSchema PacketFilterModule::schema() const {
  return {name(),
          {{"add", {{"pattern", FieldType::kString}, {"negate", FieldType::kBool, true}}},
           {"clear", {}},
           {"list", {}}},
          {}};
}

}  // namespace rfq::modules
