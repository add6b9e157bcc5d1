#include "rfq/attacks/mousejack.hpp"

#include <algorithm>
#include <fstream>

#include <spdlog/spdlog.h>

#include "rfq/crc.hpp"

namespace rfq::attacks {

using pipeline::FieldType;
using pipeline::Json;

std::vector<VendorRule> load_vendor_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open vendor table: " + path.string());
  Json doc;
  try {
    in >> doc;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("vendor table parse error: ") + e.what());
  }
  std::vector<VendorRule> out;
  for (const auto& v : doc.at("vendors")) {
    out.push_back({from_hex(v.at("prefix").get<std::string>()), v.at("label").get<std::string>()});
  }
  return out;
}

std::vector<VendorRule> default_vendor_table() {
  std::filesystem::path p = std::filesystem::path(RFQ_DATA_DIR) / "mousejack_vendors.json";
  if (!std::filesystem::exists(p)) return {};
  return load_vendor_table(p);
}

std::string classify_vendor(const std::vector<VendorRule>& table, std::span<const std::uint8_t> address) {
  const VendorRule* best = nullptr;
  for (const auto& r : table) {
    if (r.address_prefix.size() > address.size()) continue;
    if (!std::equal(r.address_prefix.begin(), r.address_prefix.end(), address.begin())) continue;
    if (!best || r.address_prefix.size() > best->address_prefix.size()) best = &r;
  }
  return best ? best->label : "unknown";
}

std::optional<MouseFrame> parse_mouse_frame(std::span<const std::uint8_t> capture, std::size_t min_len) {
  Bytes c(capture.begin(), capture.end());
  if (c.size() < min_len) c.resize(min_len, 0);
  if (c.empty() || (c[0] != 0xAA && c[0] != 0x55)) return std::nullopt;
  for (std::size_t aw : {5u, 4u, 3u}) {
    std::size_t body = 1 + aw;
    for (std::size_t n = 1; body + n + 2 <= c.size(); ++n) {
      std::span<const std::uint8_t> payload(c.data() + body, n);
      std::uint16_t crc = crc16_ccitt(payload);
      if (c[body + n] == (crc & 0xFF) && c[body + n + 1] == (crc >> 8)) {
        return MouseFrame{Bytes(c.begin() + 1, c.begin() + static_cast<std::ptrdiff_t>(body)),
                          Bytes(payload.begin(), payload.end())};
      }
    }
  }
  return std::nullopt;
}

std::string MouseJackModule::pick_radio(pipeline::Node& node) const {
  auto covers = [&](const std::string& n) {
    const auto& p = node.radios().at(n).profile();
    return p.band_lo <= cfg_.first_channel && cfg_.last_channel <= p.band_hi;
  };
  if (!cfg_.radio.empty()) {
    if (!node.radios().contains(cfg_.radio)) throw Error(ErrorCode::kUnknownRadio, "unknown radio: " + cfg_.radio);
    if (!covers(cfg_.radio)) throw Error(ErrorCode::kUnsupported, cfg_.radio + " cannot tune 2.4 GHz");
    return cfg_.radio;
  }
  for (const auto& n : node.radios().names()) {
    if (covers(n)) return n;
  }
  throw Error(ErrorCode::kUnsupported, "no 2.4 GHz radio");
}

void MouseJackModule::tune(pipeline::Node& node) {
  hal::ModemConfigPatch p;
  p.carrier_freq = channels_[cursor_];
  node.radios().at(radio_).set_modem_config(p);
  dwell_end_ = node.env().now() + cfg_.dwell_us;
}

void MouseJackModule::start(pipeline::Node& node) {
  if (!(cfg_.channel_step > 0) || cfg_.last_channel < cfg_.first_channel) {
    throw Error(ErrorCode::kInvalidArgument, "bad channel range");
  }
  if (cfg_.dwell_us <= 0) throw Error(ErrorCode::kInvalidArgument, "dwell_us must be positive");
  radio_ = pick_radio(node);
  channels_.clear();
  for (Hertz f = cfg_.first_channel; f <= cfg_.last_channel + 1; f += cfg_.channel_step) channels_.push_back(f);
  auto& radio = node.radios().at(radio_);
  hal::ModemConfigPatch p;
  p.bit_rate = cfg_.bitrate;
  p.is_promiscuous = true;
  p.packet_len = hal::PacketLength{true, cfg_.packet_len};
  radio.set_modem_config(p);
  radio.set_mode(hal::Mode::kRx);
  cursor_ = 0;
  prefixes_.clear();
  devices_.clear();
  tune(node);
  running_ = true;
  spdlog::info("mousejack: sweeping {} channels on {}", channels_.size(), radio_);
}

void MouseJackModule::stop(pipeline::Node& node) {
  if (running_ && node.radios().contains(radio_)) node.radios().at(radio_).set_mode(hal::Mode::kIdle);
  running_ = false;
}

void MouseJackModule::on_loop(pipeline::Node& node) {
  if (!running_ || node.env().now() < dwell_end_) return;
  cursor_ = (cursor_ + 1) % channels_.size();
  tune(node);
}

pipeline::Verdict MouseJackModule::on_packet_received(pipeline::Node& node, hal::Packet& pkt) {
  if (!running_ || pkt.rx_radio != radio_ || pkt.data.empty()) return pipeline::Verdict::kPass;
  std::size_t n = std::min<std::size_t>(5, pkt.data.size());
  ++prefixes_[to_hex(std::span<const std::uint8_t>(pkt.data.data(), n))];
  auto frame = parse_mouse_frame(pkt.data, cfg_.packet_len);
  if (!frame) return pipeline::Verdict::kPass;
  auto key = to_hex(frame->address);
  auto [it, fresh] = devices_.try_emplace(key);
  auto& dev = it->second;
  ++dev.frames;
  if (fresh) {
    dev.lowest = dev.highest = pkt.carrier_freq;
  } else {
    dev.lowest = std::min(dev.lowest, pkt.carrier_freq);
    dev.highest = std::max(dev.highest, pkt.carrier_freq);
  }
  dev.channel = (dev.lowest + dev.highest) / 2;
  if (fresh) {
    dev.address = frame->address;
    dev.vendor = classify_vendor(vendors_, frame->address);
    dev.first_seen = node.env().now();
    node.emit(name(), "report",
              {{"address", key}, {"channel", dev.channel}, {"vendor", dev.vendor}, {"frames", dev.frames}});
  }
  return pipeline::Verdict::kPass;
}

std::vector<std::pair<std::string, std::uint64_t>> MouseJackModule::ranking() const {
  std::vector<std::pair<std::string, std::uint64_t>> out(prefixes_.begin(), prefixes_.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

Json MouseJackModule::report() const {
  Json table = Json::array();
  for (const auto& [prefix, count] : ranking()) table.push_back({{"prefix", prefix}, {"count", count}});
  Json devs = Json::array();
  for (const auto& [key, d] : devices_) {
    devs.push_back({{"address", key}, {"channel", d.channel}, {"vendor", d.vendor}, {"frames", d.frames}});
  }
  return {{"running", running_},
          {"radio", radio_},
          {"channel", channels_.empty() ? 0.0 : channels_[cursor_]},
          {"prefixes", table},
          {"devices", devs}};
}

Json MouseJackModule::on_user_command(pipeline::Node& node, const std::string& verb, const Json& args) {
  if (verb == "start") {
    MouseJackConfig next = cfg_;
    next.radio = args.value("radio", next.radio);
    next.dwell_us = args.value("dwell_us", next.dwell_us);
    next.first_channel = args.value("first_channel", next.first_channel);
    next.last_channel = args.value("last_channel", next.last_channel);
    stop(node);
    std::swap(cfg_, next);
    try {
      start(node);
    } catch (...) {
      cfg_ = next;
      throw;
    }
    return report();
  }
  if (verb == "stop") {
    stop(node);
    return report();
  }
  if (verb == "report") return report();
  if (verb == "inject") throw Error(ErrorCode::kNotImplemented, "payload injection is not implemented");
  return Module::on_user_command(node, verb, args);
}

pipeline::ModuleSchema MouseJackModule::schema() const {
  return {name(),
          {{"start",
            {{"radio", FieldType::kString, true},
             {"dwell_us", FieldType::kInt, true},
             {"first_channel", FieldType::kNumber, true},
             {"last_channel", FieldType::kNumber, true}}},
           {"stop", {}},
           {"report", {}},
           {"inject", {{"address", FieldType::kHex}, {"payload", FieldType::kHex}}}},
          {{"report",
            {{"address", FieldType::kHex},
             {"channel", FieldType::kNumber},
             {"vendor", FieldType::kString},
             {"frames", FieldType::kInt}}}}};
}

}  // namespace rfq::attacks
