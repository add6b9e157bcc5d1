#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rfq/env/channel.hpp"

namespace rfq::env {

/// Rolling-code key fob. Each press transmits `payload` with the next code
/// written big-endian at `code_offset`.
struct KeyfobSpec {
  std::string id;
  Hertz carrier = 433.92e6;
  BitsPerSecond bitrate = 3400;
  Dbm power = -40;
  int preamble_len = 208;
  Bytes sync_word{0xD3, 0x91};
  Bytes payload;
  bool crc = true;
  std::size_t code_offset = 2;
  std::uint32_t next_code = 1;
  std::vector<Micros> presses;
};

/// 2.4 GHz HID-style device: short CRC-protected frames addressed by a
/// fixed sync word, sent periodically on one channel.
struct MouseSpec {
  std::string id;
  Hertz carrier = 2441e6;
  BitsPerSecond bitrate = 2e6;
  Dbm power = -50;
  Bytes address;
  std::size_t payload_len = 10;
  Micros start = 0;
  Micros period = 8000;
  int count = 100;
};

struct BeaconSpec {
  std::string id;
  Emission base;
  Micros period = 0;
  int count = 1;
  bool random_payload = false;
};

using ActorSpec = std::variant<KeyfobSpec, ReceiverActor, MouseSpec, BeaconSpec>;

struct EnvScenario {
  std::uint64_t seed = 1;
  Dbm noise_floor_dbm = -100;
  double rssi_noise_sigma_db = 1.0;
  double squelch_margin_db = 10.0;
  std::vector<ActorSpec> actors;

  NoiseModel noise_model() const {
    return {noise_floor_dbm, rssi_noise_sigma_db, squelch_margin_db, seed};
  }
};

class Keyfob {
 public:
  explicit Keyfob(KeyfobSpec spec) : spec_(std::move(spec)) {}

  const KeyfobSpec& spec() const { return spec_; }

  /// Data bytes (CRC excluded) the next press will carry.
  Bytes next_data() const;

  EmissionId press(RfEnvironment& env, Micros at);

  std::uint32_t next_code() const { return spec_.next_code; }

 private:
  KeyfobSpec spec_;
};

/// Transmitter actors that stay scriptable after loading.
struct ScenarioActors {
  std::map<std::string, Keyfob> keyfobs;
};

EnvScenario parse_scenario(const nlohmann::json& doc);
EnvScenario load_scenario_file(const std::filesystem::path& path);

/// Registers receivers and schedules every static emission.
ScenarioActors apply_scenario(const EnvScenario& scenario, RfEnvironment& env);

}  // namespace rfq::env
