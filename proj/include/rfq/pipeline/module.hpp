#pragma once

#include <string>

#include "rfq/hal/packet.hpp"
#include "rfq/pipeline/schema.hpp"

namespace rfq::pipeline {

class Node;

enum class Verdict { kPass, kDrop, kConsume };

/// A firmware module. Hooks run on the node strand, in priority order.
class Module {
 public:
  explicit Module(std::string name) : name_(std::move(name)) {}
  virtual ~Module() = default;

  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  const std::string& name() const { return name_; }
  bool enabled() const { return enabled_; }
  void set_enabled(bool on) { enabled_ = on; }

  virtual void on_init(Node&) {}
  virtual void on_loop(Node&) {}
  /// `args` has already been validated against the verb's schema.
  virtual Json on_user_command(Node& node, const std::string& verb, const Json& args);
  /// High-priority stage. May mutate `pkt`; kDrop and kConsume stop the chain.
  virtual Verdict on_packet_received(Node&, hal::Packet&) { return Verdict::kPass; }
  /// Low-priority stage, once per packet that survived the chain.
  virtual void after_packet_received(Node&, const hal::Packet&) {}

  virtual ModuleSchema schema() const { return {name_, {}, {}}; }

 private:
  std::string name_;
  bool enabled_ = true;
};

}  // namespace rfq::pipeline
