#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rfq/env/channel.hpp"
#include "rfq/hal/radio_proxy.hpp"
#include "rfq/pipeline/module.hpp"
#include "rfq/pipeline/queue.hpp"

namespace rfq::pipeline {

/// One message between node and host. `topic` is "<module>/<verb-or-kind>";
/// the transport adds the rfquack/in|out prefix.
struct Message {
  std::string topic;
  Json payload;

  bool operator==(const Message&) const = default;
};

struct NodeOptions {
  Micros step_us = 100;
  std::size_t rx_queue_capacity = 64;
  std::size_t host_queue_capacity = 64;
  std::size_t repeater_queue_capacity = 64;
  /// When set, virtual time only moves through node/run commands.
  bool manual_clock = false;
};

struct NodeStats {
  std::uint64_t loops = 0;
  std::uint64_t packets_received = 0;
  std::uint64_t packets_dropped = 0;
  std::uint64_t packets_consumed = 0;
  std::uint64_t packets_forwarded = 0;
  std::uint64_t rx_queue_drops = 0;
  std::uint64_t host_queue_drops = 0;
  std::uint64_t module_errors = 0;
  std::uint64_t commands = 0;
};

enum class Disposition { kForwarded, kDropped, kConsumed };

/// The firmware skeleton: module registry, the two loop stages, the
/// decoupling queues and command routing. Everything except
/// submit_command() and the host-queue readers runs on one strand.
class Node {
 public:
  using Tracer = std::function<void(const std::string& module, const std::string& hook)>;

  explicit Node(env::RfEnvironment& env, NodeOptions opts = {});
  ~Node();

  env::RfEnvironment& env() { return env_; }
  hal::RadioProxy& radios() { return radios_; }
  const NodeOptions& options() const { return opts_; }
  const NodeStats& stats() const { return stats_; }

  /// Registers `m` and calls its on_init. Modules with a lower priority run
  /// first; equal priorities keep registration order. Default priority is
  /// the registration index.
  Module& register_module(std::unique_ptr<Module> m, std::optional<int> priority = {});
  Module* find_module(const std::string& name);
  template <typename T>
  T* module_as(const std::string& name) {
    return dynamic_cast<T*>(find_module(name));
  }
  std::vector<std::string> module_names() const;

  void set_tracer(Tracer t) { tracer_ = std::move(t); }

  /// One high-priority pass and one low-priority pass; the clock advances by
  /// max(step_us, time charged by the hooks) unless the clock is manual.
  void run_loop_iteration();
  /// Iterates until the virtual clock has moved forward by `us`.
  void run_for(Micros us);

  /// Runs the onPacketReceived chain and, for survivors, queues the packet.
  Disposition dispatch_packet(hal::Packet pkt);

  /// Routes "<module>/<verb>" to the module (or the node itself). Replies
  /// go to the host queue and are also returned.
  std::vector<Message> handle_user_command(const std::string& topic, const Json& payload);

  /// Thread-safe: queues a command for the next loop boundary.
  void submit_command(std::string topic, Json payload);
  /// Thread-safe: executes queued commands now (called at loop boundaries).
  void process_commands();

  /// Queues an outbound message from `module` of the given kind.
  void emit(const std::string& module, const std::string& kind, Json payload);

  /// Thread-safe host queue access.
  std::vector<Message> drain_host();
  std::optional<Message> pop_host(std::chrono::milliseconds wait);
  void wake_host_readers();

  BoundedQueue<hal::Packet>& repeater_queue() { return repeater_queue_; }

  /// Complete machine-readable catalog of routable topics and events.
  Json schema() const;
  std::optional<MessageSpec> find_command(const std::string& module,
                                          const std::string& verb) const;

 private:
  struct Entry {
    std::unique_ptr<Module> module;
    int priority;
    std::size_t order;
  };

  void high_priority_pass();
  void low_priority_pass();
  void trace(const std::string& module, const char* hook);
  void module_error(Module& m, const char* hook, const std::exception& e);
  Json node_command(const std::string& verb, const Json& args);
  ModuleSchema node_schema() const;
  void push_host(Message m);

  env::RfEnvironment& env_;
  NodeOptions opts_;
  hal::RadioProxy radios_;
  std::vector<Entry> modules_;
  NodeStats stats_;
  Tracer tracer_;

  BoundedQueue<hal::Packet> rx_queue_;
  BoundedQueue<hal::Packet> repeater_queue_;

  std::mutex host_mu_;
  std::condition_variable host_cv_;
  BoundedQueue<Message> host_queue_;

  std::mutex cmd_mu_;
  std::vector<Message> pending_commands_;
};

/// Error payload shared by the node and the transport.
Json error_payload(const std::string& verb, const std::string& code, const std::string& message);

}  // namespace rfq::pipeline
