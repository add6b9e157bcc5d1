#include "rfq/clamp/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rfq::clamp {

std::vector<Hertz> ScanConfig::region_centers() const {
  if (!(f_o < f_end)) throw Error(ErrorCode::kInvalidArgument, "start_freq must be below end_freq");
  if (!(c > 0 && c < 1)) throw Error(ErrorCode::kInvalidArgument, "overlap ratio must be in (0, 1)");
  double spacing = (1.0 - c) / 2.0 * b_max;
  std::vector<Hertz> out;
  for (std::size_t i = 0;; ++i) {
    Hertz f = f_o + static_cast<double>(i) * spacing;
    out.push_back(f);
    if (f + b_max / 2.0 >= f_end) break;
  }
  return out;
}

Dbm FrontendRssiSource::probe(const Probe& p) {
  hal::ModemConfigPatch patch;
  if (radio_.config().carrier_freq != p.center) patch.carrier_freq = p.center;
  if (radio_.config().rx_bandwidth != p.bandwidth) patch.rx_bandwidth = p.bandwidth;
  if (!patch.empty()) radio_.set_modem_config(patch);
  ++tunings_;
  return radio_.read_rssi();
}

RegionScanResult region_scan(const ScanConfig& cfg, RssiSource& src, Dbm noise_floor) {
  RegionScanResult r;
  auto centers = cfg.region_centers();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    Dbm v = src.probe({centers[i], cfg.b_max});
    r.samples.push_back({i, centers[i], v});
    if (i == 0 || v > r.best.rssi) r.best = r.samples.back();
  }
  r.found = r.best.rssi >= noise_floor + cfg.min_rssi_delta;
  return r;
}

namespace {

struct Span {
  double lo;
  double hi;
};

// Carrier offsets |x| whose filter attenuation can lie in [a_lo, a_hi].
Span offsets_for(double a_lo, double a_hi, double half, double rolloff, double limit) {
  double lo = a_lo <= 0 ? 0 : half * (1 + std::min(a_lo, rolloff) / rolloff);
  double hi = a_hi >= rolloff ? limit : half * (1 + std::max(a_hi, 0.0) / rolloff);
  return {lo, hi};
}

std::vector<Span> intersect(const std::vector<Span>& a, const std::vector<Span>& b) {
  std::vector<Span> out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      double lo = std::max(x.lo, y.lo);
      double hi = std::min(x.hi, y.hi);
      if (lo <= hi) out.push_back({lo, hi});
    }
  }
  std::sort(out.begin(), out.end(), [](const Span& l, const Span& r) { return l.lo < r.lo; });
  return out;
}

}  // namespace

Domain localize(const std::vector<RegionSample>& profile, Hertz b_max, Dbm noise_floor,
                double noise_bound_db, double rolloff_db) {
  if (profile.empty()) throw Error(ErrorCode::kInvalidArgument, "empty region profile");
  auto best = std::max_element(profile.begin(), profile.end(),
                               [](const RegionSample& a, const RegionSample& b) {
                                 return a.rssi < b.rssi || (a.rssi == b.rssi && a.center > b.center);
                               });
  Domain fallback{best->center - b_max / 2, best->center + b_max / 2};
  double half = b_max / 2;
  double nb = std::max(noise_bound_db, 0.1);
  double inf = std::numeric_limits<double>::infinity();

  std::vector<Span> cells{{best->center - b_max, best->center + b_max}};
  for (const auto& s : profile) {
    bool signal = s.rssi > noise_floor + nb;
    double a_lo = best->rssi - s.rssi - 2 * nb;
    double a_hi = signal ? best->rssi - s.rssi + 2 * nb : inf;
    Span off = offsets_for(a_lo, a_hi, half, rolloff_db, signal ? b_max : inf);
    cells = intersect(cells, {{s.center - off.hi, s.center - off.lo},
                              {s.center + off.lo, s.center + off.hi}});
    if (cells.empty()) return fallback;
  }
  Domain d{cells.front().lo, cells.back().hi};
  if (d.width() > b_max) return fallback;
  return d;
}

Hertz TrichotomicSearch::next_width(const std::vector<Hertz>& ladder, Hertz w) {
  Hertz narrowest = ladder.back();
  if (3 * narrowest >= w) return narrowest;
  std::optional<Hertz> best;
  for (Hertz b : ladder) {
    if (b < w / 3 || b >= w) continue;
    if (!best || std::fabs(b - w / 2) < std::fabs(*best - w / 2)) best = b;
  }
  if (best) return *best;
  for (Hertz b : ladder) {
    if (b < w) return b;
  }
  return narrowest;
}

TrichotomicSearch::TrichotomicSearch(Domain start, std::vector<Hertz> ladder,
                                     Dbm vanish_threshold)
    : ladder_(std::move(ladder)), vanish_threshold_(vanish_threshold), domain_(start) {
  if (ladder_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty filter ladder");
  std::sort(ladder_.begin(), ladder_.end(), std::greater<>());
  start_level();
}

void TrichotomicSearch::start_level() {
  Hertz w = domain_.width();
  if (w <= ladder_.back()) {
    done_ = true;
    result_ = domain_.center();
    return;
  }
  window_ = next_width(ladder_, w);
  centers_[0] = domain_.lo + window_ / 2;
  centers_[1] = domain_.center();
  centers_[2] = domain_.hi - window_ / 2;
  slot_ = 0;
}

Probe TrichotomicSearch::next() const {
  if (done_) throw Error(ErrorCode::kBadState, "search already finished");
  return {centers_[slot_], window_};
}

void TrichotomicSearch::feed(Dbm rssi) {
  if (done_) throw Error(ErrorCode::kBadState, "search already finished");
  readings_[slot_++] = rssi;
  ++tunings_;
  if (slot_ < 3) return;
  int k = 0;
  for (int i = 1; i < 3; ++i) {
    if (readings_[i] > readings_[k]) k = i;
  }
  ++levels_;
  if (readings_[k] < vanish_threshold_) {
    done_ = true;
    vanished_ = true;
    return;
  }
  domain_ = {centers_[k] - window_ / 2, centers_[k] + window_ / 2};
  if (window_ <= ladder_.back()) {
    done_ = true;
    result_ = centers_[k];
    return;
  }
  start_level();
}

std::optional<Hertz> trichotomic_refine(Domain start, const std::vector<Hertz>& ladder,
                                        RssiSource& src, Dbm vanish_threshold) {
  TrichotomicSearch s(start, ladder, vanish_threshold);
  while (!s.done()) s.feed(src.probe(s.next()));
  if (s.vanished()) return std::nullopt;
  return s.result();
}

FrequencySearchResult find_frequency(const ScanConfig& cfg, const std::vector<Hertz>& ladder,
                                     RssiSource& src, Dbm noise_floor, double noise_bound_db) {
  FrequencySearchResult out;
  auto scan = region_scan(cfg, src, noise_floor);
  out.tunings = static_cast<int>(scan.samples.size());
  if (!scan.found) return out;
  out.domain = localize(scan.samples, cfg.b_max, noise_floor, noise_bound_db);
  TrichotomicSearch s(out.domain, ladder, noise_floor + cfg.min_rssi_delta);
  while (!s.done()) s.feed(src.probe(s.next()));
  out.tunings += s.tunings();
  if (s.vanished()) return out;
  out.found = true;
  out.freq_hat = s.result();
  return out;
}

}  // namespace rfq::clamp
