#pragma once

#include <string>
#include <vector>

#include "rfq/pipeline/node.hpp"

namespace rfq::attacks {

struct RollJamConfig {
  std::string listen_radio = "radioA";
  std::string jam_radio = "radioB";
  int repeats = 2;          // codes to capture before replaying
  Hertz jam_offset = 50e3;  // jam carrier = listen carrier + offset
  Dbm jam_power = -55;
  Micros replay_delay_us = 20'000;  // after the last capture, lets the channel clear
};

/// Jams the target receiver slightly off its carrier while a narrow-filter
/// listener captures the codes it misses, then stops jamming and replays
/// the last capture from the listener.
class RollJamModule : public pipeline::Module {
 public:
  enum class Phase { kIdle, kJamming, kDone };

  explicit RollJamModule(RollJamConfig cfg = {}) : Module("rolljam"), cfg_(std::move(cfg)) {}

  void start(pipeline::Node& node);
  void stop(pipeline::Node& node);

  void on_loop(pipeline::Node& node) override;
  pipeline::Verdict on_packet_received(pipeline::Node& node, hal::Packet& pkt) override;
  pipeline::Json on_user_command(pipeline::Node& node, const std::string& verb,
                                 const pipeline::Json& args) override;
  pipeline::ModuleSchema schema() const override;

  Phase phase() const { return phase_; }
  const RollJamConfig& config() const { return cfg_; }
  const std::vector<Bytes>& captured() const { return captured_; }
  const Bytes& replayed() const { return replayed_; }

 private:
  static RollJamConfig merge(RollJamConfig base, const pipeline::Json& args);
  void check(pipeline::Node& node, const RollJamConfig& cfg) const;
  pipeline::Json status() const;

  RollJamConfig cfg_;
  Phase phase_ = Phase::kIdle;
  std::vector<Bytes> captured_;
  Bytes replayed_;
  Micros replay_at_ = 0;
};

}  // namespace rfq::attacks
