#pragma once

#include "rfq/pipeline/node.hpp"

namespace rfq::modules {

/// Retransmits every packet that survived the high-priority chain on a
/// target radio. Host forwarding is unaffected.
class RepeaterModule : public pipeline::Module {
 public:
  RepeaterModule() : Module("repeater") {}

  void after_packet_received(pipeline::Node& node, const hal::Packet& pkt) override;
  void on_loop(pipeline::Node& node) override;
  pipeline::Json on_user_command(pipeline::Node& node, const std::string& verb,
                                 const pipeline::Json& args) override;
  pipeline::ModuleSchema schema() const override;

  bool active() const { return active_; }

 private:
  pipeline::Json state() const;

  bool active_ = false;
  std::string target_ = "radioB";
  int count_ = 1;
};

}  // namespace rfq::modules
