#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "rfq/common.hpp"
#include "rfq/env/emission.hpp"
#include "rfq/env/receiver.hpp"

namespace rfq::env {

class VirtualClock {
 public:
  Micros now() const noexcept { return now_; }
  void advance(Micros dt) {
    if (dt < 0) throw Error(ErrorCode::kInvalidArgument, "negative clock step");
    now_ += dt;
  }

 private:
  Micros now_ = 0;
};

struct NoiseModel {
  Dbm noise_floor = -100.0;
  double rssi_sigma_db = 1.0;
  double squelch_margin_db = 10.0;
  std::uint64_t seed = 1;

  Dbm squelch() const { return noise_floor + squelch_margin_db; }
};

struct RssiObservation {
  Dbm value = 0;
  Micros at = 0;
  Hertz tuned = 0;
  Hertz bandwidth = 0;
};

inline constexpr double kFilterRolloffDb = 60.0;

// Flat passband of width `bandwidth`, then a linear 60 dB rolloff over one
// more half-bandwidth, then total rejection (+infinity).
double filter_attenuation_db(Hertz offset, Hertz bandwidth);

using EmissionId = std::size_t;

/// A level change of the sliced in-band signal.
struct Transition {
  double at = 0;
  bool level = false;
};

/// Deterministic simulated RF channel. Owns the virtual clock; every
/// advance delivers completed emissions to receiver actors.
class RfEnvironment {
 public:
  explicit RfEnvironment(NoiseModel noise = {});

  const NoiseModel& noise() const { return noise_; }
  Micros now() const { return clock_.now(); }

  /// Moves virtual time forward by `dt` and delivers every emission repeat
  /// that finished inside the window.
  Micros advance(Micros dt);
  void advance_to(Micros t) { if (t > now()) advance(t - now()); }

  EmissionId add_emission(Emission e);
  void cancel_emission(EmissionId id, Micros at);
  const Emission& emission(EmissionId id) const { return emissions_.at(id); }
  std::size_t emission_count() const { return emissions_.size(); }

  RssiObservation observe_rssi(Hertz tuned, Hertz bandwidth, Micros at) const;

  bool level_at(Hertz tuned, Hertz bandwidth, double t) const;

  /// Samples `n` hard-decision symbols at `from + k/sample_rate`.
  std::vector<std::uint8_t> observe_symbols(Hertz tuned, Hertz bandwidth,
                                            BitsPerSecond sample_rate,
                                            double from, std::size_t n) const;

  /// Level at `t0` followed by every level change in (t0, t1].
  std::vector<Transition> transitions(Hertz tuned, Hertz bandwidth, double t0,
                                      double t1) const;

  // Receivers.
  void add_receiver(ReceiverActor actor);
  ReceiverDecision receiver_accepts(const std::string& actor_id,
                                    std::span<const std::uint8_t> payload,
                                    Micros at);
  const ReceiverActor& receiver(const std::string& actor_id) const;
  const std::vector<ReceptionEvent>& reception_log() const { return log_; }

  /// Hook invoked for every delivered reception (accepted or not).
  void on_reception(std::function<void(const ReceptionEvent&)> cb) {
    reception_cb_ = std::move(cb);
  }

 private:
  std::vector<EmissionId> candidates(Hertz tuned, Hertz bandwidth, double t0,
                                     double t1) const;
  bool jammed(const ReceiverActor& rx, double t0, double t1,
              std::optional<EmissionId> exclude) const;
  double noise_sample(Micros at, Hertz tuned) const;
  void deliver(EmissionId id, int repeat);

  NoiseModel noise_;
  VirtualClock clock_;
  std::vector<Emission> emissions_;
  std::multimap<Micros, EmissionId> by_start_;
  std::vector<EmissionId> continuous_;
  double max_span_us_ = 0;

  struct PendingEnd {
    double end;
    EmissionId id;
    int repeat;
    bool operator>(const PendingEnd& o) const {
      return end != o.end ? end > o.end : id > o.id;
    }
  };
  std::priority_queue<PendingEnd, std::vector<PendingEnd>, std::greater<>>
      pending_;

  std::map<std::string, ReceiverActor> receivers_;
  std::vector<ReceptionEvent> log_;
  std::function<void(const ReceptionEvent&)> reception_cb_;
};

}  // namespace rfq::env
