#include "rfq/env/channel.hpp"

#include "rfq/crc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rfq::env {

namespace {

constexpr double kIndexEps = 1e-7;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

bool Emission::bit(std::size_t index) const {
  if (index < static_cast<std::size_t>(preamble_len)) return index % 2 == 0;
  std::size_t j = index - static_cast<std::size_t>(preamble_len);
  std::size_t byte_index = j / 8;
  std::uint8_t byte = byte_index < sync_word.size()
                          ? sync_word[byte_index]
                          : payload[byte_index - sync_word.size()];
  return (byte >> (7 - j % 8)) & 1;
}

double Emission::end_us() const {
  double cancel = static_cast<double>(cancel_time);
  if (continuous) return cancel;
  return std::min(cancel, repeat_start_us(repeat_count - 1) + repeat_duration_us());
}

bool Emission::active_at(double t) const {
  if (t < static_cast<double>(start_time) || t >= static_cast<double>(cancel_time)) {
    return false;
  }
  if (continuous) return true;
  double dur = repeat_duration_us();
  double period = dur + static_cast<double>(inter_repeat_gap);
  int k = static_cast<int>(std::floor((t - static_cast<double>(start_time)) / period));
  if (k < 0 || k >= repeat_count) return false;
  return t - repeat_start_us(k) < dur;
}

bool Emission::on_at(double t) const {
  if (!active_at(t)) return false;
  if (continuous) return true;
  double dur = repeat_duration_us();
  double period = dur + static_cast<double>(inter_repeat_gap);
  int k = static_cast<int>(std::floor((t - static_cast<double>(start_time)) / period));
  double within = t - repeat_start_us(k);
  auto idx = static_cast<std::size_t>(std::floor(within * bitrate / 1e6 + kIndexEps));
  idx = std::min(idx, bit_count() - 1);
  return bit(idx);
}

double filter_attenuation_db(Hertz offset, Hertz bandwidth) {
  double off = std::fabs(offset);
  double half = bandwidth / 2.0;
  if (off <= half) return 0.0;
  if (off <= bandwidth) return kFilterRolloffDb * (off - half) / half;
  return kInf;
}

RfEnvironment::RfEnvironment(NoiseModel noise) : noise_(noise) {}

Micros RfEnvironment::advance(Micros dt) {
  clock_.advance(dt);
  auto now = static_cast<double>(clock_.now());
  while (!pending_.empty() && pending_.top().end <= now) {
    auto next = pending_.top();
    pending_.pop();
    deliver(next.id, next.repeat);
  }
  return clock_.now();
}

EmissionId RfEnvironment::add_emission(Emission e) {
  if (!(e.bitrate > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "emission bitrate must be positive");
  }
  if (!e.continuous && e.bit_count() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "emission carries no bits");
  }
  if (e.repeat_count < 1) e.repeat_count = 1;
  EmissionId id = emissions_.size();
  emissions_.push_back(std::move(e));
  const Emission& em = emissions_.back();
  if (em.continuous) {
    continuous_.push_back(id);
  } else {
    by_start_.emplace(em.start_time, id);
    max_span_us_ = std::max(max_span_us_, em.end_us() - static_cast<double>(em.start_time));
    for (int k = 0; k < em.repeat_count; ++k) {
      pending_.push({em.repeat_start_us(k) + em.repeat_duration_us(), id, k});
    }
  }
  return id;
}

void RfEnvironment::cancel_emission(EmissionId id, Micros at) {
  auto& e = emissions_.at(id);
  e.cancel_time = std::min(e.cancel_time, at);
}

std::vector<EmissionId> RfEnvironment::candidates(Hertz tuned, Hertz bandwidth,
                                                  double t0, double t1) const {
  std::vector<EmissionId> out;
  auto consider = [&](EmissionId id) {
    const auto& e = emissions_[id];
    if (e.end_us() <= t0 || static_cast<double>(e.start_time) > t1) return;
    double rx = e.power - filter_attenuation_db(e.carrier - tuned, bandwidth);
    if (rx > noise_.squelch()) out.push_back(id);
  };
  auto lo = static_cast<Micros>(std::floor(t0 - max_span_us_)) - 1;
  auto hi = static_cast<Micros>(std::ceil(t1));
  for (auto it = by_start_.lower_bound(lo); it != by_start_.end() && it->first <= hi; ++it) {
    consider(it->second);
  }
  for (auto id : continuous_) consider(id);
  return out;
}

double RfEnvironment::noise_sample(Micros at, Hertz tuned) const {
  if (noise_.rssi_sigma_db <= 0) return 0.0;
  std::uint64_t key = splitmix64(noise_.seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(at));
  key = splitmix64(key ^ static_cast<std::uint64_t>(std::llround(tuned)));
  std::mt19937_64 gen(key);
  std::normal_distribution<double> dist(0.0, noise_.rssi_sigma_db);
  double limit = 3.0 * noise_.rssi_sigma_db;
  return std::clamp(dist(gen), -limit, limit);
}

RssiObservation RfEnvironment::observe_rssi(Hertz tuned, Hertz bandwidth, Micros at) const {
  double t = static_cast<double>(at);
  Dbm strongest = noise_.noise_floor;
  auto lo = static_cast<Micros>(std::floor(t - max_span_us_)) - 1;
  auto visit = [&](EmissionId id) {
    const auto& e = emissions_[id];
    if (!e.active_at(t)) return;
    strongest = std::max(strongest, e.power - filter_attenuation_db(e.carrier - tuned, bandwidth));
  };
  for (auto it = by_start_.lower_bound(lo); it != by_start_.end() && it->first <= at; ++it) {
    visit(it->second);
  }
  for (auto id : continuous_) visit(id);
  return {strongest + noise_sample(at, tuned), at, tuned, bandwidth};
}

bool RfEnvironment::level_at(Hertz tuned, Hertz bandwidth, double t) const {
  for (auto id : candidates(tuned, bandwidth, t, t)) {
    if (emissions_[id].on_at(t)) return true;
  }
  return false;
}

std::vector<std::uint8_t> RfEnvironment::observe_symbols(Hertz tuned, Hertz bandwidth,
                                                         BitsPerSecond sample_rate,
                                                         double from, std::size_t n) const {
  if (!(sample_rate > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  std::vector<std::uint8_t> out(n, 0);
  if (n == 0) return out;
  double step = 1e6 / sample_rate;
  double last = from + static_cast<double>(n - 1) * step;
  auto ids = candidates(tuned, bandwidth, from, last);
  if (ids.empty()) return out;
  for (std::size_t k = 0; k < n; ++k) {
    double t = from + static_cast<double>(k) * step;
    for (auto id : ids) {
      if (emissions_[id].on_at(t)) {
        out[k] = 1;
        break;
      }
    }
  }
  return out;
}

std::vector<Transition> RfEnvironment::transitions(Hertz tuned, Hertz bandwidth, double t0,
                                                   double t1) const {
  auto ids = candidates(tuned, bandwidth, t0, t1);
  auto level = [&](double t) {
    for (auto id : ids) {
      if (emissions_[id].on_at(t)) return true;
    }
    return false;
  };
  std::vector<Transition> out{{t0, level(t0)}};
  if (ids.empty() || t1 <= t0) return out;

  std::vector<double> times;
  auto push = [&](double t) {
    if (t > t0 && t <= t1) times.push_back(t);
  };
  for (auto id : ids) {
    const auto& e = emissions_[id];
    push(static_cast<double>(e.start_time));
    push(static_cast<double>(e.cancel_time));
    if (e.continuous) continue;
    double dur = e.repeat_duration_us();
    double period = 1e6 / e.bitrate;
    std::size_t bits = e.bit_count();
    for (int k = 0; k < e.repeat_count; ++k) {
      double s = e.repeat_start_us(k);
      if (s > t1) break;
      if (s + dur < t0) continue;
      push(s);
      push(s + dur);
      double jlo = std::max(1.0, std::ceil((t0 - s) / period) - 1);
      double jhi = std::min(static_cast<double>(bits) - 1, std::floor((t1 - s) / period) + 1);
      for (auto j = static_cast<std::size_t>(jlo); static_cast<double>(j) <= jhi; ++j) {
        if (e.bit(j) != e.bit(j - 1)) push(s + static_cast<double>(j) * period);
      }
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double t : times) {
    bool l = level(t);
    if (l != out.back().level) out.push_back({t, l});
  }
  return out;
}

void RfEnvironment::add_receiver(ReceiverActor actor) {
  auto id = actor.id;
  if (!receivers_.emplace(id, std::move(actor)).second) {
    throw Error(ErrorCode::kDuplicate, "duplicate actor id: " + id);
  }
}

const ReceiverActor& RfEnvironment::receiver(const std::string& actor_id) const {
  auto it = receivers_.find(actor_id);
  if (it == receivers_.end()) {
    throw Error(ErrorCode::kUnknownActor, "unknown actor: " + actor_id);
  }
  return it->second;
}

bool RfEnvironment::jammed(const ReceiverActor& rx, double t0, double t1,
                           std::optional<EmissionId> exclude) const {
  for (auto id : candidates(rx.carrier, rx.bandwidth, t0, t1)) {
    if (exclude && *exclude == id) continue;
    return true;
  }
  return false;
}

namespace {

ReceiverDecision apply_rule(AcceptanceRule& rule, std::span<const std::uint8_t> data) {
  return std::visit(
      [&](auto& r) -> ReceiverDecision {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, RollingCodeRule>) {
          if (data.size() < r.code_offset + 4) return {false, "malformed"};
          auto code = read_code(data, r.code_offset);
          if (code <= r.last) return {false, "replay"};
          if (code - r.last > r.window) return {false, "outside_window"};
          r.last = code;
          return {true, "accepted"};
        } else {
          if (data.size() < r.prefix.size() ||
              !std::equal(r.prefix.begin(), r.prefix.end(), data.begin())) {
            return {false, "no_match"};
          }
          return {true, "accepted"};
        }
      },
      rule);
}

}  // namespace

ReceiverDecision RfEnvironment::receiver_accepts(const std::string& actor_id,
                                                 std::span<const std::uint8_t> payload,
                                                 Micros at) {
  auto it = receivers_.find(actor_id);
  if (it == receivers_.end()) {
    throw Error(ErrorCode::kUnknownActor, "unknown actor: " + actor_id);
  }
  auto& rx = it->second;
  ReceiverDecision d;
  double t = static_cast<double>(at);
  if (jammed(rx, t, t, std::nullopt)) {
    d = {false, "jammed"};
  } else {
    d = apply_rule(rx.rule, payload);
  }
  ReceptionEvent ev{at, rx.id, "direct", Bytes(payload.begin(), payload.end()), d.accepted, d.reason};
  log_.push_back(ev);
  if (reception_cb_) reception_cb_(ev);
  return d;
}

void RfEnvironment::deliver(EmissionId id, int repeat) {
  const auto& e = emissions_[id];
  double s = e.repeat_start_us(repeat);
  double end = s + e.repeat_duration_us();
  if (static_cast<double>(e.cancel_time) < end) return;
  for (auto& [rid, rx] : receivers_) {
    if (e.sync_word != rx.sync_word) continue;
    if (std::fabs(e.bitrate / rx.bitrate - 1.0) > rx.bitrate_tolerance) continue;
    if (e.power - filter_attenuation_db(e.carrier - rx.carrier, rx.bandwidth) <= noise_.squelch()) {
      continue;
    }
    ReceiverDecision d;
    Bytes data;
    std::size_t need = rx.packet_len + (rx.crc ? 2 : 0);
    if (jammed(rx, s, end, id)) {
      d = {false, "jammed"};
    } else if (e.payload.size() < need) {
      d = {false, "malformed"};
    } else {
      std::span<const std::uint8_t> framed(e.payload.data(), need);
      data.assign(framed.begin(), framed.begin() + static_cast<long>(rx.packet_len));
      if (rx.crc && !check_crc16(framed)) {
        d = {false, "crc"};
      } else {
        d = apply_rule(rx.rule, data);
      }
    }
    ReceptionEvent ev{static_cast<Micros>(std::ceil(end)), rx.id, e.source, data, d.accepted, d.reason};
    log_.push_back(ev);
    if (reception_cb_) reception_cb_(ev);
  }
}

std::uint32_t read_code(std::span<const std::uint8_t> data, std::size_t offset) {
  return (static_cast<std::uint32_t>(data[offset]) << 24) |
         (static_cast<std::uint32_t>(data[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(data[offset + 2]) << 8) |
         static_cast<std::uint32_t>(data[offset + 3]);
}

void write_code(Bytes& data, std::size_t offset, std::uint32_t code) {
  if (data.size() < offset + 4) data.resize(offset + 4, 0);
  data[offset] = static_cast<std::uint8_t>(code >> 24);
  data[offset + 1] = static_cast<std::uint8_t>(code >> 16);
  data[offset + 2] = static_cast<std::uint8_t>(code >> 8);
  data[offset + 3] = static_cast<std::uint8_t>(code);
}

}  // namespace rfq::env
