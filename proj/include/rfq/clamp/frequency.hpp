#pragma once

#include <optional>
#include <vector>

#include "rfq/common.hpp"
#include "rfq/hal/frontend.hpp"

namespace rfq::clamp {

struct ScanConfig {
  Hertz f_o = 432e6;
  Hertz f_end = 437e6;
  double c = 0.25;       // region overlap ratio
  Hertz b_max = 812e3;   // widest filter
  double min_rssi_delta = 10.0;

  /// f_i = f_o + i * (1 - c) / 2 * B_max for i = 0..N, N minimal such that
  /// f_N + B_max / 2 reaches f_end.
  std::vector<Hertz> region_centers() const;
};

/// One tuning: where to listen and how wide.
struct Probe {
  Hertz center = 0;
  Hertz bandwidth = 0;
};

/// Anything that can tune and return one RSSI reading.
class RssiSource {
 public:
  virtual ~RssiSource() = default;
  virtual Dbm probe(const Probe& p) = 0;
};

/// Tunes a frontend (carrier + filter) and takes one stable RSSI read.
class FrontendRssiSource : public RssiSource {
 public:
  explicit FrontendRssiSource(hal::Frontend& radio) : radio_(radio) {}
  Dbm probe(const Probe& p) override;
  int tunings() const { return tunings_; }

 private:
  hal::Frontend& radio_;
  int tunings_ = 0;
};

struct RegionSample {
  std::size_t index = 0;
  Hertz center = 0;
  Dbm rssi = 0;
};

struct RegionScanResult {
  bool found = false;
  RegionSample best;
  std::vector<RegionSample> samples;
};

/// One RSSI sample per region at B_max. `found` iff the best region is at
/// least min_rssi_delta above `noise_floor`; ties go to the lower frequency.
RegionScanResult region_scan(const ScanConfig& cfg, RssiSource& src, Dbm noise_floor);

struct Domain {
  Hertz lo = 0;
  Hertz hi = 0;
  Hertz width() const { return hi - lo; }
  Hertz center() const { return (lo + hi) / 2; }
};

/// Narrows the carrier position from region samples taken at B_max. Each
/// reading bounds its region's filter attenuation to within 2 *
/// noise_bound_db of the loudest one, which on the linear rolloff is a pair
/// of offset intervals around the region center; the result is the hull of
/// their intersection. Falls back to the best region's window if the
/// constraints are inconsistent.
Domain localize(const std::vector<RegionSample>& profile, Hertz b_max, Dbm noise_floor,
                double noise_bound_db = 3.0, double rolloff_db = 60.0);

/// Trichotomic refinement as a step machine: three windows of the next
/// narrower filter placed flush with the domain edges and at its middle;
/// the loudest window becomes the next domain.
class TrichotomicSearch {
 public:
  TrichotomicSearch(Domain start, std::vector<Hertz> ladder, Dbm vanish_threshold);

  bool done() const { return done_; }
  bool vanished() const { return vanished_; }
  Probe next() const;
  void feed(Dbm rssi);

  Hertz result() const { return result_; }
  const Domain& domain() const { return domain_; }
  Hertz window() const { return window_; }
  int tunings() const { return tunings_; }
  int levels() const { return levels_; }

  /// Next filter for a domain of width `w`: the narrowest one when three of
  /// them span `w`, else the ladder width closest to w/2 that is >= w/3.
  static Hertz next_width(const std::vector<Hertz>& ladder, Hertz w);

 private:
  void start_level();

  std::vector<Hertz> ladder_;
  Dbm vanish_threshold_;
  Domain domain_;
  Hertz window_ = 0;
  Hertz centers_[3] = {0, 0, 0};
  Dbm readings_[3] = {0, 0, 0};
  int slot_ = 0;
  int tunings_ = 0;
  int levels_ = 0;
  bool done_ = false;
  bool vanished_ = false;
  Hertz result_ = 0;
};

/// Runs a search to completion. Returns nullopt if the signal vanished.
std::optional<Hertz> trichotomic_refine(Domain start, const std::vector<Hertz>& ladder,
                                        RssiSource& src, Dbm vanish_threshold);

/// Region sweep, local profile, localization and refinement in one call.
struct FrequencySearchResult {
  bool found = false;
  Hertz freq_hat = 0;
  Domain domain;
  int tunings = 0;
};

FrequencySearchResult find_frequency(const ScanConfig& cfg, const std::vector<Hertz>& ladder,
                                     RssiSource& src, Dbm noise_floor,
                                     double noise_bound_db = 3.0);

}  // namespace rfq::clamp
