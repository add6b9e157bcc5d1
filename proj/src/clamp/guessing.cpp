#include "rfq/clamp/guessing.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace rfq::clamp {

using pipeline::FieldType;
using pipeline::Json;

const char* to_string(GuessingModule::Phase p) {
  switch (p) {
    case GuessingModule::Phase::kIdle: return "idle";
    case GuessingModule::Phase::kSweep: return "sweep";
    case GuessingModule::Phase::kProfile: return "profile";
    case GuessingModule::Phase::kRefine: return "refine";
    case GuessingModule::Phase::kEstimate: return "estimate";
    case GuessingModule::Phase::kReceive: return "receive";
  }
  return "idle";
}

void GuessingModule::start(pipeline::Node& node) {
  auto& radio = node.radios().at(cfg_.radio);
  ladder_ = radio.profile().filter_widths;
  cfg_.scan.b_max = radio.profile().widest_filter();
  if (cfg_.bitrate.r_o > radio.profile().max_bitrate) {
    throw Error(ErrorCode::kOutOfRange, "sampling_bitrate above the radio's maximum");
  }
  centers_ = cfg_.scan.region_centers();
  threshold_ = node.env().noise().noise_floor + cfg_.scan.min_rssi_delta;
  radio.set_mode(hal::Mode::kIdle);
  radio.precompute_calibration(centers_.front() - cfg_.scan.b_max / 2,
                               centers_.back() + cfg_.scan.b_max / 2);
  estimator_ = BitrateEstimator(cfg_.bitrate);
  cursor_ = 0;
  phase_ = Phase::kSweep;
  spdlog::info("guessing: {} regions over {:.3f}-{:.3f} MHz on {}", centers_.size(),
               cfg_.scan.f_o / 1e6, cfg_.scan.f_end / 1e6, cfg_.radio);
}

void GuessingModule::stop(pipeline::Node& node) {
  phase_ = Phase::kIdle;
  search_.reset();
  if (node.radios().contains(cfg_.radio)) node.radios().at(cfg_.radio).set_mode(hal::Mode::kIdle);
}

void GuessingModule::restart(pipeline::Node& node) {
  ++restarts_;
  search_.reset();
  profile_.clear();
  got_packet_ = false;
  node.radios().at(cfg_.radio).set_mode(hal::Mode::kIdle);
  phase_ = Phase::kSweep;
}

Dbm GuessingModule::probe(pipeline::Node& node, Hertz center, Hertz bw) {
  auto& radio = node.radios().at(cfg_.radio);
  hal::ModemConfigPatch patch;
  if (radio.config().carrier_freq != center) patch.carrier_freq = center;
  if (radio.config().rx_bandwidth != bw) patch.rx_bandwidth = bw;
  if (!patch.empty()) radio.set_modem_config(patch);
  return radio.read_rssi();
}

void GuessingModule::sweep_step(pipeline::Node& node) {
  Dbm v = probe(node, centers_[cursor_], cfg_.scan.b_max);
  if (v >= threshold_) {
    current_ = {};
    current_.detected_at = node.env().now();
    tunings_ = 0;
    profile_ = {{cursor_, centers_[cursor_], v}};
    phase_ = Phase::kProfile;
    return;
  }
  cursor_ = (cursor_ + 1) % centers_.size();
}

void GuessingModule::profile_step(pipeline::Node& node) {
  Dbm best = std::max_element(profile_.begin(), profile_.end(), [](auto& a, auto& b) {
               return a.rssi < b.rssi;
             })->rssi;
  auto closed = [&](const RegionSample& edge, bool at_range_end) {
    return at_range_end || edge.rssi < best - cfg_.plateau_db;
  };
  bool lower_closed = closed(profile_.front(), profile_.front().index == 0);
  bool upper_closed = closed(profile_.back(), profile_.back().index + 1 == centers_.size());
  if (!lower_closed) {
    std::size_t i = profile_.front().index - 1;
    ++tunings_;
    profile_.insert(profile_.begin(), {i, centers_[i], probe(node, centers_[i], cfg_.scan.b_max)});
    return;
  }
  if (!upper_closed) {
    std::size_t i = profile_.back().index + 1;
    ++tunings_;
    profile_.push_back({i, centers_[i], probe(node, centers_[i], cfg_.scan.b_max)});
    return;
  }
  if (best < threshold_) {
    restart(node);
    return;
  }
  Domain d = localize(profile_, cfg_.scan.b_max, node.env().noise().noise_floor,
                      3 * node.env().noise().rssi_sigma_db);
  search_.emplace(d, ladder_, threshold_);
  phase_ = Phase::kRefine;
  if (search_->done()) finish_frequency(node, search_->result());
}

void GuessingModule::finish_frequency(pipeline::Node& node, Hertz freq_hat) {
  auto& radio = node.radios().at(cfg_.radio);
  Micros now = node.env().now();
  current_.t_freq = now - current_.detected_at;
  current_.tunings = tunings_;
  estimate_start_ = now;
  hal::ModemConfigPatch patch;
  patch.carrier_freq = freq_hat;
  patch.rx_bandwidth = cfg_.post_clamp_bandwidth;
  patch.bit_rate = cfg_.bitrate.r_o;
  radio.set_modem_config(patch);
  current_.freq_hat = radio.config().carrier_freq;
  radio.start_capture();
  estimator_.reset();
  deadline_ = node.env().now() + cfg_.estimate_timeout;
  phase_ = Phase::kEstimate;
}

void GuessingModule::on_loop(pipeline::Node& node) {
  switch (phase_) {
    case Phase::kIdle: return;
    case Phase::kSweep: sweep_step(node); return;
    case Phase::kProfile: profile_step(node); return;
    case Phase::kRefine: {
      auto p = search_->next();
      ++tunings_;
      search_->feed(probe(node, p.center, p.bandwidth));
      if (!search_->done()) return;
      if (search_->vanished()) {
        restart(node);
        return;
      }
      finish_frequency(node, search_->result());
      return;
    }
    case Phase::kEstimate: {
      auto& radio = node.radios().at(cfg_.radio);
      auto r = estimator_.feed(radio.capture_samples());
      if (!r) {
        if (node.env().now() > deadline_) restart(node);
        return;
      }
      hal::ModemConfigPatch patch;
      patch.bit_rate = *r;
      radio.set_modem_config(patch);
      radio.set_mode(hal::Mode::kRx);
      Micros now = node.env().now();
      current_.bitrate_hat = radio.config().bit_rate;
      current_.t_br = now - estimate_start_;
      current_.clamped_at = now;
      results_.push_back(current_);
      node.emit(name(), "clamp",
                {{"carrierFreq", current_.freq_hat},
                 {"bitRate", current_.bitrate_hat},
                 {"tFreqUs", current_.t_freq},
                 {"tBrUs", current_.t_br},
                 {"detectedAtUs", current_.detected_at},
                 {"clampedAtUs", current_.clamped_at},
                 {"tunings", current_.tunings}});
      got_packet_ = false;
      deadline_ = now + cfg_.rx_timeout;
      phase_ = Phase::kReceive;
      return;
    }
    case Phase::kReceive:
      if (got_packet_) {
        ++decoded_;
        restart(node);
      } else if (node.env().now() > deadline_) {
        restart(node);
      }
      return;
  }
}

pipeline::Verdict GuessingModule::on_packet_received(pipeline::Node&, hal::Packet& pkt) {
  if (phase_ == Phase::kReceive && pkt.rx_radio == cfg_.radio) got_packet_ = true;
  return pipeline::Verdict::kPass;
}

Json GuessingModule::status() const {
  Json j{{"phase", to_string(phase_)},
         {"radio", cfg_.radio},
         {"start_freq", cfg_.scan.f_o},
         {"end_freq", cfg_.scan.f_end},
         {"sampling_bitrate", cfg_.bitrate.r_o},
         {"max_buffer", cfg_.bitrate.max_buffer},
         {"clamps", results_.size()},
         {"decoded", decoded_},
         {"restarts", restarts_}};
  if (!results_.empty()) {
    const auto& r = results_.back();
    j["last"] = {{"carrierFreq", r.freq_hat}, {"bitRate", r.bitrate_hat},
                 {"tFreqUs", r.t_freq},       {"tBrUs", r.t_br}};
  }
  return j;
}

Json GuessingModule::on_user_command(pipeline::Node& node, const std::string& verb,
                                     const Json& args) {
  if (verb == "start") {
    start(node);
    return status();
  }
  if (verb == "stop") {
    stop(node);
    return status();
  }
  if (verb == "status") return status();
  if (verb == "set") {
    GuessingConfig next = cfg_;
    if (args.contains("start_freq")) next.scan.f_o = args["start_freq"].get<double>();
    if (args.contains("end_freq")) next.scan.f_end = args["end_freq"].get<double>();
    if (args.contains("sampling_bitrate")) next.bitrate.r_o = args["sampling_bitrate"].get<double>();
    if (args.contains("max_buffer")) next.bitrate.max_buffer = args["max_buffer"].get<std::size_t>();
    if (args.contains("radio")) next.radio = args["radio"].get<std::string>();
    if (!node.radios().contains(next.radio)) {
      throw Error(ErrorCode::kUnknownRadio, "unknown radio: " + next.radio);
    }
    next.scan.region_centers();
    if (!(next.bitrate.r_o > 0)) throw Error(ErrorCode::kInvalidArgument, "sampling_bitrate must be positive");
    if (next.bitrate.max_buffer == 0) throw Error(ErrorCode::kInvalidArgument, "max_buffer must be positive");
    bool running = phase_ != Phase::kIdle;
    if (running) stop(node);
    cfg_ = next;
    if (running) start(node);
    return status();
  }
  return Module::on_user_command(node, verb, args);
}

pipeline::ModuleSchema GuessingModule::schema() const {
  return {name(),
          {{"start", {}},
           {"stop", {}},
           {"status", {}},
           {"set",
            {{"start_freq", FieldType::kNumber, true},
             {"end_freq", FieldType::kNumber, true},
             {"sampling_bitrate", FieldType::kNumber, true},
             {"max_buffer", FieldType::kInt, true},
             {"radio", FieldType::kString, true}}}},
          {{"clamp",
            {{"carrierFreq", FieldType::kNumber},
             {"bitRate", FieldType::kNumber},
             {"tFreqUs", FieldType::kInt},
             {"tBrUs", FieldType::kInt},
             {"detectedAtUs", FieldType::kInt},
             {"clampedAtUs", FieldType::kInt},
             {"tunings", FieldType::kInt}}}}};
}

}  // namespace rfq::clamp
