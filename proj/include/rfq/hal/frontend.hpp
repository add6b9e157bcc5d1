#pragma once

#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rfq/env/channel.hpp"
#include "rfq/hal/demod.hpp"
#include "rfq/hal/modem_config.hpp"
#include "rfq/hal/packet.hpp"
#include "rfq/hal/registers.hpp"

namespace rfq::hal {

struct FrontendStats {
  std::uint64_t rx_packets = 0;
  std::uint64_t tx_packets = 0;
  std::uint64_t crc_errors = 0;
  std::uint64_t retunes = 0;
  std::uint64_t calibrations = 0;
  std::uint64_t rssi_reads = 0;
};

/// On-air bytes after the sync word for `data` under `cfg`: optional length
/// byte, the data, then the CRC (little-endian) when enabled. Throws
/// kOutOfRange when the data does not fit the packet format.
Bytes build_frame(const ModemConfig& cfg, std::span<const std::uint8_t> data,
                  std::size_t max_packet_len);

/// A virtual transceiver attached to the simulated channel. All operations
/// that take time on real hardware charge the virtual clock.
class Frontend {
 public:
  static constexpr Micros kRepeatGap = 10'000;

  Frontend(std::string name, FrontendProfile profile, env::RfEnvironment& env);

  const std::string& name() const { return name_; }
  const FrontendProfile& profile() const { return profile_; }
  Mode mode() const { return mode_; }
  const ModemConfig& config() const { return config_; }
  const FrontendStats& stats() const { return stats_; }

  void set_mode(Mode m);

  /// Validates every provided field, then applies them all. Returns the
  /// wire names of the applied fields.
  std::vector<std::string> set_modem_config(const ModemConfigPatch& patch);

  std::uint8_t get_register(std::uint8_t addr) const;
  void set_register(std::uint8_t addr, std::uint8_t value);

  /// Schedules `repeat` emissions (auto-switching to TX). Returns after
  /// scheduling; a busy transmitter queues behind its previous emission.
  std::vector<env::EmissionId> transmit(std::span<const std::uint8_t> data, int repeat = 1);

  /// Packets completed since the last poll (RX or promiscuous mode only).
  std::vector<Packet> poll_reception();

  /// Takes one stable RSSI reading at the current tuning (charges t_rssi).
  Dbm read_rssi();
  Dbm last_rssi() const { return last_rssi_; }

  /// Raw hard-decision samples at the configured bitrate, gathered from the
  /// last start_capture() up to now. Independent of the radio mode.
  void start_capture();
  std::vector<std::uint8_t> capture_samples();

  /// Runs and caches calibration for every synthesizer bin in [lo, hi],
  /// charging t_cal per bin that was not cached yet.
  void precompute_calibration(Hertz lo, Hertz hi);
  bool calibration_cached(Hertz f) const;

 private:
  bool promiscuous() const;
  ModemConfig validate(const ModemConfigPatch& patch) const;
  void restart_reception();
  void cancel_jam();
  std::int64_t cal_bin(Hertz f) const;

  std::string name_;
  FrontendProfile profile_;
  env::RfEnvironment& env_;
  std::unique_ptr<RegisterMap> map_;
  RegisterFile regs_;
  ModemConfig config_;
  Mode mode_ = Mode::kIdle;
  FrontendStats stats_;
  Dbm last_rssi_ = 0;

  ClockRecovery clock_;
  std::unique_ptr<PacketFramer> framer_;
  std::unique_ptr<RawFramer> raw_framer_;

  double capture_origin_ = 0;
  std::size_t capture_next_ = 0;

  std::optional<env::EmissionId> jam_;
  std::vector<env::EmissionId> tx_emissions_;
  double tx_busy_until_ = 0;
  std::set<std::int64_t> cal_cache_;
};

}  // namespace rfq::hal
