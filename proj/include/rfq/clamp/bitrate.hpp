#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rfq/common.hpp"

namespace rfq::clamp {

/// Histogram of same-symbol run lengths: (length, occurrences), sorted by
/// length.
struct RunLengthSummary {
  std::vector<std::pair<std::size_t, std::size_t>> runs;

  std::size_t count() const;   // sum of w_i
  std::size_t span() const;    // sum of |p_i| * w_i
};

enum class RunSelection { kAll, kOnes };
enum class EdgeRuns { kDrop, kKeep };

/// Runs of `samples`, by default with the first and last run dropped since
/// they may be truncated. kOnes keeps only runs of 1s.
RunLengthSummary summarize_runs(std::span<const std::uint8_t> samples,
                                RunSelection sel = RunSelection::kAll,
                                EdgeRuns edges = EdgeRuns::kDrop);

/// r_hat = r_o * sum(w_i) / sum(|p_i| * w_i). nullopt when no run is left.
std::optional<BitsPerSecond> estimate_bitrate(const RunLengthSummary& s, BitsPerSecond r_o);
std::optional<BitsPerSecond> estimate_bitrate(std::span<const std::uint8_t> samples,
                                              BitsPerSecond r_o,
                                              RunSelection sel = RunSelection::kAll,
                                              EdgeRuns edges = EdgeRuns::kDrop);

struct BitrateEstimatorConfig {
  BitsPerSecond r_o = 60e3;
  std::size_t min_runs = 6;      // three full alternation periods
  std::size_t min_span = 128;    // samples covered by the counted runs
  std::size_t max_buffer = 64;   // bytes of samples kept (x8 samples)
};

/// Streaming estimator fed with raw oversampled symbols.
class BitrateEstimator {
 public:
  explicit BitrateEstimator(BitrateEstimatorConfig cfg) : cfg_(cfg) {}

  /// Returns the estimate as soon as the stop rule is met. A full buffer
  /// without enough runs is discarded and collection restarts.
  std::optional<BitsPerSecond> feed(std::span<const std::uint8_t> samples);
  void reset() { buffer_.clear(); }
  std::size_t buffered() const { return buffer_.size(); }
  std::size_t restarts() const { return restarts_; }
  const BitrateEstimatorConfig& config() const { return cfg_; }

 private:
  BitrateEstimatorConfig cfg_;
  std::vector<std::uint8_t> buffer_;
  std::size_t restarts_ = 0;
};

}  // namespace rfq::clamp
