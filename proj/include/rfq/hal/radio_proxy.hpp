#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rfq/hal/frontend.hpp"

namespace rfq::hal {

/// Transceiver-agnostic front door: every call names a radio and is
/// forwarded to that frontend only.
class RadioProxy {
 public:
  explicit RadioProxy(env::RfEnvironment& env) : env_(env) {}

  Frontend& add(const std::string& name, FrontendProfile profile);
  Frontend& at(const std::string& name);
  const Frontend& at(const std::string& name) const;
  bool contains(const std::string& name) const;
  std::vector<std::string> names() const;

  void set_mode(const std::string& radio, Mode m) { at(radio).set_mode(m); }
  std::vector<std::string> set_modem_config(const std::string& radio,
                                            const ModemConfigPatch& patch) {
    return at(radio).set_modem_config(patch);
  }
  const ModemConfig& get_modem_config(const std::string& radio) const {
    return at(radio).config();
  }
  std::uint8_t get_register(const std::string& radio, std::uint8_t addr) const {
    return at(radio).get_register(addr);
  }
  void set_register(const std::string& radio, std::uint8_t addr, std::uint8_t value) {
    at(radio).set_register(addr, value);
  }
  std::vector<env::EmissionId> transmit(const std::string& radio,
                                        std::span<const std::uint8_t> data, int repeat = 1) {
    return at(radio).transmit(data, repeat);
  }
  std::vector<Packet> poll_reception(const std::string& radio) {
    return at(radio).poll_reception();
  }

 private:
  env::RfEnvironment& env_;
  std::vector<std::unique_ptr<Frontend>> radios_;
};

}  // namespace rfq::hal
