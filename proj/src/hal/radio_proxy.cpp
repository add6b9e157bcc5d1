#include "rfq/hal/radio_proxy.hpp"

namespace rfq::hal {

Frontend& RadioProxy::add(const std::string& name, FrontendProfile profile) {
  if (contains(name)) throw Error(ErrorCode::kDuplicate, "duplicate radio: " + name);
  radios_.push_back(std::make_unique<Frontend>(name, std::move(profile), env_));
  return *radios_.back();
}

Frontend& RadioProxy::at(const std::string& name) {
  for (auto& r : radios_) {
    if (r->name() == name) return *r;
  }
  throw Error(ErrorCode::kUnknownRadio, "unknown radio: " + name);
}

const Frontend& RadioProxy::at(const std::string& name) const {
  return const_cast<RadioProxy*>(this)->at(name);
}

bool RadioProxy::contains(const std::string& name) const {
  for (const auto& r : radios_) {
    if (r->name() == name) return true;
  }
  return false;
}

std::vector<std::string> RadioProxy::names() const {
  std::vector<std::string> out;
  for (const auto& r : radios_) out.push_back(r->name());
  return out;
}

}  // namespace rfq::hal
