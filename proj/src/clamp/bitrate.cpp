#include "rfq/clamp/bitrate.hpp"

#include <map>

namespace rfq::clamp {

std::size_t RunLengthSummary::count() const {
  std::size_t n = 0;
  for (const auto& [len, w] : runs) n += w;
  return n;
}

std::size_t RunLengthSummary::span() const {
  std::size_t n = 0;
  for (const auto& [len, w] : runs) n += len * w;
  return n;
}

RunLengthSummary summarize_runs(std::span<const std::uint8_t> samples, RunSelection sel,
                                EdgeRuns edges) {
  struct Run {
    std::uint8_t value;
    std::size_t len;
  };
  std::vector<Run> runs;
  for (auto s : samples) {
    std::uint8_t v = s ? 1 : 0;
    if (!runs.empty() && runs.back().value == v) {
      ++runs.back().len;
    } else {
      runs.push_back({v, 1});
    }
  }
  std::map<std::size_t, std::size_t> hist;
  std::size_t skip = edges == EdgeRuns::kDrop ? 1 : 0;
  for (std::size_t i = skip; i + skip < runs.size(); ++i) {
    if (sel == RunSelection::kOnes && runs[i].value != 1) continue;
    ++hist[runs[i].len];
  }
  return {{hist.begin(), hist.end()}};
}

std::optional<BitsPerSecond> estimate_bitrate(const RunLengthSummary& s, BitsPerSecond r_o) {
  std::size_t span = s.span();
  if (span == 0) return std::nullopt;
  return r_o * static_cast<double>(s.count()) / static_cast<double>(span);
}

std::optional<BitsPerSecond> estimate_bitrate(std::span<const std::uint8_t> samples,
                                              BitsPerSecond r_o, RunSelection sel,
                                              EdgeRuns edges) {
  return estimate_bitrate(summarize_runs(samples, sel, edges), r_o);
}

std::optional<BitsPerSecond> BitrateEstimator::feed(std::span<const std::uint8_t> samples) {
  std::size_t cap = cfg_.max_buffer * 8;
  std::size_t pos = 0;
  while (pos < samples.size()) {
    std::size_t take = std::min(cap - buffer_.size(), samples.size() - pos);
    buffer_.insert(buffer_.end(), samples.begin() + static_cast<std::ptrdiff_t>(pos),
                   samples.begin() + static_cast<std::ptrdiff_t>(pos + take));
    pos += take;
    auto s = summarize_runs(buffer_);
    bool full = buffer_.size() >= cap;
    if (s.count() >= cfg_.min_runs && (s.span() >= cfg_.min_span || full)) {
      auto r = estimate_bitrate(s, cfg_.r_o);
      buffer_.clear();
      return r;
    }
    if (full) {
      buffer_.clear();
      ++restarts_;
    }
  }
  return std::nullopt;
}

}  // namespace rfq::clamp
