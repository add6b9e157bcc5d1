#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfq/pipeline/node.hpp"

namespace rfq::attacks {

struct VendorRule {
  Bytes address_prefix;
  std::string label;
};

std::vector<VendorRule> load_vendor_table(const std::filesystem::path& path);
std::vector<VendorRule> default_vendor_table();

/// Longest matching address prefix wins; "unknown" otherwise.
std::string classify_vendor(const std::vector<VendorRule>& table, std::span<const std::uint8_t> address);

/// A raw capture that parsed as [preamble][address][payload][CRC-16 LE over
/// payload].
struct MouseFrame {
  Bytes address;
  Bytes payload;
};

/// Tries address widths 5, 4, 3 and every payload length; the capture is
/// zero-extended to `min_len` first since idle trimming drops trailing zero
/// bytes.
std::optional<MouseFrame> parse_mouse_frame(std::span<const std::uint8_t> capture,
                                            std::size_t min_len = 32);

struct MouseJackConfig {
  std::string radio;  // empty: first radio covering the channel range
  Hertz first_channel = 2405e6;
  Hertz last_channel = 2474e6;
  Hertz channel_step = 1e6;
  Micros dwell_us = 10'000;
  BitsPerSecond bitrate = 2e6;
  std::size_t packet_len = 32;
};

struct MouseDevice {
  Bytes address;
  Hertz channel = 0;  // middle of the channels it was heard on
  Hertz lowest = 0;
  Hertz highest = 0;
  std::string vendor;
  std::uint64_t frames = 0;
  Micros first_seen = 0;
};

/// Promiscuous channel sweep that ranks the leading bytes of raw captures
/// and reports CRC-valid devices with a vendor label. Injection is
/// deliberately not implemented.
class MouseJackModule : public pipeline::Module {
 public:
  explicit MouseJackModule(MouseJackConfig cfg = {}, std::vector<VendorRule> vendors = default_vendor_table())
      : Module("mousejack"), cfg_(std::move(cfg)), vendors_(std::move(vendors)) {}

  void start(pipeline::Node& node);
  void stop(pipeline::Node& node);

  void on_loop(pipeline::Node& node) override;
  pipeline::Verdict on_packet_received(pipeline::Node& node, hal::Packet& pkt) override;
  pipeline::Json on_user_command(pipeline::Node& node, const std::string& verb,
                                 const pipeline::Json& args) override;
  pipeline::ModuleSchema schema() const override;

  bool running() const { return running_; }
  const std::string& radio() const { return radio_; }
  /// (first five capture bytes as hex, count), most frequent first.
  std::vector<std::pair<std::string, std::uint64_t>> ranking() const;
  const std::map<std::string, MouseDevice>& devices() const { return devices_; }

 private:
  std::string pick_radio(pipeline::Node& node) const;
  void tune(pipeline::Node& node);
  pipeline::Json report() const;

  MouseJackConfig cfg_;
  std::vector<VendorRule> vendors_;
  bool running_ = false;
  std::string radio_;
  std::vector<Hertz> channels_;
  std::size_t cursor_ = 0;
  Micros dwell_end_ = 0;
  std::map<std::string, std::uint64_t> prefixes_;
  std::map<std::string, MouseDevice> devices_;
};

}  // namespace rfq::attacks
