#include "rfq/hal/frontend.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "rfq/crc.hpp"

namespace rfq::hal {

Bytes build_frame(const ModemConfig& cfg, std::span<const std::uint8_t> data,
                  std::size_t max_packet_len) {
  std::size_t limit = std::min(cfg.packet_len.len, max_packet_len);
  if (data.size() > limit) {
    throw Error(ErrorCode::kOutOfRange, "payload of " + std::to_string(data.size()) +
                                            " bytes exceeds packet length " +
                                            std::to_string(limit));
  }
  Bytes out;
  if (!cfg.packet_len.fixed) out.push_back(static_cast<std::uint8_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());
  if (cfg.packet_len.fixed) out.resize(cfg.packet_len.len, 0);
  if (cfg.crc_enabled) append_crc16(out);
  return out;
}

namespace {

std::unique_ptr<RegisterMap> make_map(const FrontendProfile& p) {
  if (p.name == "VNRF24") return std::make_unique<Vnrf24RegisterMap>(p.filter_widths);
  return std::make_unique<Vc1101RegisterMap>(p.filter_widths);
}

}  // namespace

Frontend::Frontend(std::string name, FrontendProfile profile, env::RfEnvironment& env)
    : name_(std::move(name)),
      profile_(std::move(profile)),
      env_(env),
      map_(make_map(profile_)),
      regs_(profile_.register_count),
      config_(profile_.defaults) {
  map_->encode(config_, regs_);
  clock_.reset(static_cast<double>(env_.now()));
  capture_origin_ = static_cast<double>(env_.now());
}

bool Frontend::promiscuous() const {
  return mode_ == Mode::kPromiscuous || (mode_ == Mode::kRx && config_.is_promiscuous);
}

void Frontend::cancel_jam() {
  if (jam_) {
    env_.cancel_emission(*jam_, env_.now());
    jam_.reset();
  }
}

void Frontend::restart_reception() {
  clock_.reset(static_cast<double>(env_.now()));
  framer_ = std::make_unique<PacketFramer>(config_, profile_.max_packet_len);
  raw_framer_ = std::make_unique<RawFramer>(std::max<std::size_t>(1, config_.packet_len.len));
}

void Frontend::set_mode(Mode m) {
  if (m == mode_) return;
  if (mode_ == Mode::kJam) cancel_jam();
  if (m == Mode::kIdle) {
    for (auto id : tx_emissions_) {
      if (env_.emission(id).end_us() > static_cast<double>(env_.now())) {
        env_.cancel_emission(id, env_.now());
      }
    }
    tx_emissions_.clear();
    tx_busy_until_ = static_cast<double>(env_.now());
  }
  mode_ = m;
  if (m == Mode::kJam) {
    env::Emission e;
    e.source = name_;
    e.carrier = config_.carrier_freq;
    e.bitrate = config_.bit_rate;
    e.power = config_.tx_power;
    e.start_time = env_.now();
    e.continuous = true;
    jam_ = env_.add_emission(std::move(e));
  }
  if (m == Mode::kRx || m == Mode::kPromiscuous) restart_reception();
  spdlog::debug("{}: mode {}", name_, to_string(m));
}

ModemConfig Frontend::validate(const ModemConfigPatch& patch) const {
  ModemConfig cfg = config_;
  if (patch.carrier_freq) {
    Hertz f = *patch.carrier_freq;
    Hertz q = std::round(f / profile_.freq_step) * profile_.freq_step;
    if (std::fabs(q - f) > 1e-3 && profile_.freq_step > 1) {
      throw Error(ErrorCode::kUnsupported, "carrier not on the channel grid");
    }
    if (!(q >= profile_.band_lo && q <= profile_.band_hi)) {
      throw Error(ErrorCode::kOutOfRange, "carrier outside the supported band");
    }
    cfg.carrier_freq = q;
  }
  if (patch.bit_rate) {
    BitsPerSecond r = *patch.bit_rate;
    if (!profile_.allowed_bitrates.empty()) {
      auto it = std::find_if(profile_.allowed_bitrates.begin(), profile_.allowed_bitrates.end(),
                             [&](double a) { return std::fabs(a - r) < 1e-6; });
      if (it == profile_.allowed_bitrates.end()) {
        throw Error(ErrorCode::kUnsupported, "bitrate not supported by this frontend");
      }
      cfg.bit_rate = *it;
    } else {
      if (!(r > 0) || r > profile_.max_bitrate) {
        throw Error(ErrorCode::kUnsupported, "bitrate outside the supported range");
      }
      cfg.bit_rate = std::max(profile_.bitrate_step,
                              std::round(r / profile_.bitrate_step) * profile_.bitrate_step);
    }
  }
  if (patch.freq_dev) {
    if (!(*patch.freq_dev >= 0)) throw Error(ErrorCode::kInvalidArgument, "negative deviation");
    cfg.freq_dev = *patch.freq_dev;
  }
  if (patch.rx_bandwidth) {
    auto it = std::find_if(profile_.filter_widths.begin(), profile_.filter_widths.end(),
                           [&](double w) { return std::fabs(w - *patch.rx_bandwidth) < 0.5; });
    if (it == profile_.filter_widths.end()) {
      throw Error(ErrorCode::kUnsupported, "bandwidth not in the filter set");
    }
    cfg.rx_bandwidth = *it;
  }
  if (patch.modulation) cfg.modulation = *patch.modulation;
  if (patch.tx_power) {
    if (!(*patch.tx_power >= profile_.min_tx_power && *patch.tx_power <= profile_.max_tx_power)) {
      throw Error(ErrorCode::kOutOfRange, "txPower outside the supported range");
    }
    cfg.tx_power = *patch.tx_power;
  }
  if (patch.is_promiscuous) cfg.is_promiscuous = *patch.is_promiscuous;
  if (patch.sync_word) {
    auto n = patch.sync_word->size();
    if (n < profile_.min_sync_len || n > profile_.max_sync_len) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sync word must be " + std::to_string(profile_.min_sync_len) + ".." +
                      std::to_string(profile_.max_sync_len) + " bytes");
    }
    cfg.sync_word = *patch.sync_word;
  }
  if (patch.preamble_len) {
    if (*patch.preamble_len < 0 || *patch.preamble_len > 4096) {
      throw Error(ErrorCode::kOutOfRange, "preambleLen outside 0..4096");
    }
    cfg.preamble_len = *patch.preamble_len;
  }
  if (patch.packet_len) {
    if (patch.packet_len->len < 1 || patch.packet_len->len > profile_.max_packet_len) {
      throw Error(ErrorCode::kOutOfRange,
                  "packetLen outside 1.." + std::to_string(profile_.max_packet_len));
    }
    cfg.packet_len = *patch.packet_len;
  }
  if (patch.crc_enabled) cfg.crc_enabled = *patch.crc_enabled;
  return cfg;
}

std::vector<std::string> Frontend::set_modem_config(const ModemConfigPatch& patch) {
  ModemConfig cfg = validate(patch);
  std::vector<std::string> applied;
  const auto& names = modem_field_names();
  if (patch.carrier_freq) applied.push_back(names[0]);
  if (patch.bit_rate) applied.push_back(names[1]);
  if (patch.freq_dev) applied.push_back(names[2]);
  if (patch.rx_bandwidth) applied.push_back(names[3]);
  if (patch.modulation) applied.push_back(names[4]);
  if (patch.tx_power) applied.push_back(names[5]);
  if (patch.is_promiscuous) applied.push_back(names[6]);
  if (patch.sync_word) applied.push_back(names[7]);
  if (patch.preamble_len) applied.push_back(names[8]);
  if (patch.packet_len) {
    applied.push_back(names[9]);
    applied.push_back(names[10]);
  }
  if (patch.crc_enabled) applied.push_back(names[11]);

  Micros cost = 0;
  const auto& t = profile_.timing;
  if (cfg.carrier_freq != config_.carrier_freq) {
    cost = t.t_hop + t.t_driver;
    if (cal_cache_.insert(cal_bin(cfg.carrier_freq)).second) {
      cost += t.t_cal;
      ++stats_.calibrations;
    }
    ++stats_.retunes;
  } else if (!(cfg == config_)) {
    cost = t.t_driver;
  }
  bool moved = cfg.carrier_freq != config_.carrier_freq || cfg.tx_power != config_.tx_power;
  config_ = cfg;
  map_->encode(config_, regs_);
  if (mode_ == Mode::kJam && moved) {
    cancel_jam();
    mode_ = Mode::kIdle;
    set_mode(Mode::kJam);
  }
  env_.advance(cost);
  if (mode_ == Mode::kRx || mode_ == Mode::kPromiscuous) restart_reception();
  return applied;
}

std::uint8_t Frontend::get_register(std::uint8_t addr) const { return regs_.read(addr); }

void Frontend::set_register(std::uint8_t addr, std::uint8_t value) {
  std::uint8_t old = regs_.read(addr);
  regs_.write(addr, value);
  if (!map_->is_mapped(addr)) return;
  try {
    auto patch = map_->decode(regs_);
    // Apply only fields that actually changed so that the time charged
    // matches what the equivalent set_modem_config call would cost.
    ModemConfigPatch diff;
    if (patch.carrier_freq && *patch.carrier_freq != config_.carrier_freq)
      diff.carrier_freq = patch.carrier_freq;
    if (patch.bit_rate && *patch.bit_rate != config_.bit_rate) diff.bit_rate = patch.bit_rate;
    if (patch.rx_bandwidth && *patch.rx_bandwidth != config_.rx_bandwidth)
      diff.rx_bandwidth = patch.rx_bandwidth;
    if (patch.sync_word && *patch.sync_word != config_.sync_word) diff.sync_word = patch.sync_word;
    if (!diff.empty()) set_modem_config(diff);
  } catch (...) {
    regs_.write(addr, old);
    throw;
  }
}

std::vector<env::EmissionId> Frontend::transmit(std::span<const std::uint8_t> data, int repeat) {
  Bytes frame = build_frame(config_, data, profile_.max_packet_len);
  if (repeat < 0) throw Error(ErrorCode::kInvalidArgument, "repeat must be >= 0");
  if (repeat == 0) return {};
  if (mode_ != Mode::kTx) set_mode(Mode::kTx);
  double now = static_cast<double>(env_.now());
  env::Emission e;
  e.source = name_;
  e.carrier = config_.carrier_freq;
  e.bitrate = config_.bit_rate;
  e.power = config_.tx_power;
  e.preamble_len = config_.preamble_len;
  e.sync_word = config_.sync_word;
  e.payload = std::move(frame);
  e.start_time = static_cast<Micros>(std::ceil(std::max(now, tx_busy_until_)));
  e.repeat_count = repeat;
  e.inter_repeat_gap = kRepeatGap;
  auto id = env_.add_emission(std::move(e));
  tx_busy_until_ = env_.emission(id).end_us();
  tx_emissions_.push_back(id);
  stats_.tx_packets += static_cast<std::uint64_t>(repeat);
  return {id};
}

std::vector<Packet> Frontend::poll_reception() {
  std::vector<Packet> out;
  if (mode_ != Mode::kRx && mode_ != Mode::kPromiscuous) return out;
  if (!framer_) restart_reception();
  auto now = env_.now();
  auto make = [&](Bytes data) {
    Packet p;
    p.data = std::move(data);
    p.rx_radio = name_;
    p.carrier_freq = config_.carrier_freq;
    p.bit_rate = config_.bit_rate;
    p.rssi = env_.observe_rssi(config_.carrier_freq, config_.rx_bandwidth, now).value;
    p.millis = now / 1000;
    p.timestamp_us = now;
    return p;
  };
  if (promiscuous()) {
    clock_.run(env_, config_.carrier_freq, config_.rx_bandwidth, config_.bit_rate,
               static_cast<double>(now), *raw_framer_);
    for (auto& chunk : raw_framer_->take()) out.push_back(make(std::move(chunk)));
  } else {
    clock_.run(env_, config_.carrier_freq, config_.rx_bandwidth, config_.bit_rate,
               static_cast<double>(now), *framer_);
    for (auto& f : framer_->take()) {
      if (!f.crc_ok) {
        ++stats_.crc_errors;
        continue;
      }
      out.push_back(make(std::move(f.data)));
    }
  }
  stats_.rx_packets += out.size();
  return out;
}

Dbm Frontend::read_rssi() {
  env_.advance(profile_.timing.t_rssi);
  last_rssi_ = env_.observe_rssi(config_.carrier_freq, config_.rx_bandwidth, env_.now()).value;
  ++stats_.rssi_reads;
  return last_rssi_;
}

void Frontend::start_capture() {
  capture_origin_ = static_cast<double>(env_.now());
  capture_next_ = 0;
}

std::vector<std::uint8_t> Frontend::capture_samples() {
  double step = 1e6 / config_.bit_rate;
  double span = static_cast<double>(env_.now()) - capture_origin_;
  if (span < 0) return {};
  auto last = static_cast<std::size_t>(std::floor(span / step + 1e-9));
  if (last + 1 <= capture_next_) return {};
  std::size_t n = last + 1 - capture_next_;
  auto out = env_.observe_symbols(config_.carrier_freq, config_.rx_bandwidth, config_.bit_rate,
                                  capture_origin_ + static_cast<double>(capture_next_) * step, n);
  capture_next_ += n;
  return out;
}

std::int64_t Frontend::cal_bin(Hertz f) const {
  return static_cast<std::int64_t>(std::floor(f / profile_.cal_bin));
}

void Frontend::precompute_calibration(Hertz lo, Hertz hi) {
  Micros cost = 0;
  for (auto b = cal_bin(lo); b <= cal_bin(hi); ++b) {
    if (cal_cache_.insert(b).second) {
      ++stats_.calibrations;
      cost += profile_.timing.t_cal;
    }
  }
  env_.advance(cost);
}

bool Frontend::calibration_cached(Hertz f) const { return cal_cache_.count(cal_bin(f)) > 0; }

}  // namespace rfq::hal
