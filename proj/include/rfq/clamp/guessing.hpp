#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rfq/clamp/bitrate.hpp"
#include "rfq/clamp/frequency.hpp"
#include "rfq/pipeline/node.hpp"

namespace rfq::clamp {

struct ClampResult {
  Hertz freq_hat = 0;
  BitsPerSecond bitrate_hat = 0;
  Micros t_freq = 0;       // detection to freq_hat
  Micros t_br = 0;         // estimation start to bitrate applied
  Micros detected_at = 0;
  Micros clamped_at = 0;
  int tunings = 0;         // frequency-search tunings after detection
};

struct GuessingConfig {
  std::string radio = "radioA";
  ScanConfig scan;
  BitrateEstimatorConfig bitrate;
  Hertz post_clamp_bandwidth = 116e3;
  Micros estimate_timeout = 50'000;
  Micros rx_timeout = 300'000;
  double plateau_db = 6.0;  // profile grows until both edges fall this far below the peak
};

/// Automatic clamping: region sweep until activity, local region profile,
/// trichotomic refinement, bitrate estimation from oversampled symbols,
/// then RX at the recovered parameters. One tuning per onLoop call.
class GuessingModule : public pipeline::Module {
 public:
  enum class Phase { kIdle, kSweep, kProfile, kRefine, kEstimate, kReceive };

  explicit GuessingModule(GuessingConfig cfg = {})
      : Module("guessing"), cfg_(std::move(cfg)), estimator_(cfg_.bitrate) {}

  void start(pipeline::Node& node);
  void stop(pipeline::Node& node);

  void on_loop(pipeline::Node& node) override;
  pipeline::Verdict on_packet_received(pipeline::Node& node, hal::Packet& pkt) override;
  pipeline::Json on_user_command(pipeline::Node& node, const std::string& verb,
                                 const pipeline::Json& args) override;
  pipeline::ModuleSchema schema() const override;

  Phase phase() const { return phase_; }
  const GuessingConfig& config() const { return cfg_; }
  GuessingConfig& config() { return cfg_; }
  const std::vector<ClampResult>& results() const { return results_; }
  std::uint64_t packets_decoded() const { return decoded_; }
  std::uint64_t restarts() const { return restarts_; }

 private:
  Dbm probe(pipeline::Node& node, Hertz center, Hertz bw);
  void restart(pipeline::Node& node);
  void finish_frequency(pipeline::Node& node, Hertz freq_hat);
  void sweep_step(pipeline::Node& node);
  void profile_step(pipeline::Node& node);
  pipeline::Json status() const;

  GuessingConfig cfg_;
  BitrateEstimator estimator_;
  Phase phase_ = Phase::kIdle;
  Dbm threshold_ = 0;
  std::vector<Hertz> centers_;
  std::vector<Hertz> ladder_;
  std::size_t cursor_ = 0;
  std::vector<RegionSample> profile_;  // contiguous, ascending index
  std::optional<TrichotomicSearch> search_;
  int tunings_ = 0;
  ClampResult current_;
  Micros estimate_start_ = 0;
  Micros deadline_ = 0;
  bool got_packet_ = false;
  std::vector<ClampResult> results_;
  std::uint64_t decoded_ = 0;
  std::uint64_t restarts_ = 0;
};

const char* to_string(GuessingModule::Phase p);

}  // namespace rfq::clamp
