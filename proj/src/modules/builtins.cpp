#include "rfq/modules/builtins.hpp"

#include <algorithm>
#include <functional>

#include "rfq/attacks/mousejack.hpp"
#include "rfq/attacks/rolljam.hpp"
#include "rfq/clamp/guessing.hpp"
#include "rfq/modules/packet_filter.hpp"
#include "rfq/modules/packet_mod.hpp"
#include "rfq/modules/radio_module.hpp"
#include "rfq/modules/repeater.hpp"

namespace rfq::modules {

namespace {

using Factory = std::function<std::unique_ptr<pipeline::Module>()>;

const std::vector<std::pair<std::string, Factory>>& factories() {
  static const std::vector<std::pair<std::string, Factory>> list{
      {"radioA", [] { return std::make_unique<RadioModule>("radioA", hal::vc1101_profile()); }},
      {"radioB", [] { return std::make_unique<RadioModule>("radioB", hal::vc1101_profile()); }},
      {"radioC", [] { return std::make_unique<RadioModule>("radioC", hal::vnrf24_profile()); }},
      {"packet_filter", [] { return std::make_unique<PacketFilterModule>(); }},
      {"packet_mod", [] { return std::make_unique<PacketModModule>(); }},
      {"repeater", [] { return std::make_unique<RepeaterModule>(); }},
      {"guessing", [] { return std::make_unique<clamp::GuessingModule>(); }},
      {"rolljam", [] { return std::make_unique<attacks::RollJamModule>(); }},
      {"mousejack", [] { return std::make_unique<attacks::MouseJackModule>(); }},
  };
  return list;
}

}  // namespace

const std::vector<std::string>& builtin_module_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [n, f] : factories()) out.push_back(n);
    return out;
  }();
  return names;
}

void register_builtins(pipeline::Node& node, const std::vector<std::string>& names) {
  const auto& all = builtin_module_names();
  for (const auto& n : names) {
    if (std::find(all.begin(), all.end(), n) == all.end()) {
      throw Error(ErrorCode::kInvalidArgument, "unknown module: " + n);
    }
  }
  for (const auto& [n, make] : factories()) {
    if (names.empty() || std::find(names.begin(), names.end(), n) != names.end()) {
      node.register_module(make());
    }
  }
}

}  // namespace rfq::modules
