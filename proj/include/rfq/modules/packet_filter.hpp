#pragma once

#include <regex>
#include <string>
#include <vector>

#include "rfq/common.hpp"
#include "rfq/pipeline/node.hpp"

namespace rfq::modules {

struct FilterRule {
  std::string pattern;
  bool negate = false;
};

/// Conjunction of regex rules over the lowercase hex text of a payload.
class PacketFilter {
 public:
  /// Throws kInvalidArgument when the pattern does not compile.
  void add(FilterRule rule);
  void clear();
  const std::vector<FilterRule>& rules() const { return rules_; }

  bool accepts(std::span<const std::uint8_t> data) const;

 private:
  std::vector<FilterRule> rules_;
  std::vector<std::regex> compiled_;
};

class PacketFilterModule : public pipeline::Module {
 public:
  PacketFilterModule() : Module("packet_filter") {}

  pipeline::Verdict on_packet_received(pipeline::Node& node, hal::Packet& pkt) override;
  pipeline::Json on_user_command(pipeline::Node& node, const std::string& verb,
                                 const pipeline::Json& args) override;
  pipeline::ModuleSchema schema() const override;

  PacketFilter& filter() { return filter_; }

 private:
  PacketFilter filter_;
};

}  // namespace rfq::modules
