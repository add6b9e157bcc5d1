#pragma once

#include "rfq/hal/modem_config.hpp"
#include "rfq/hal/packet.hpp"
#include "rfq/pipeline/schema.hpp"

namespace rfq::pipeline {

Json to_json(const hal::Packet& p);
hal::Packet packet_from_json(const Json& j);

Json to_json(const hal::ModemConfig& cfg);

/// Reads any subset of the wire config fields. When only one of
/// isFixedPacketLen/packetLen is present, the other is taken from `current`.
hal::ModemConfigPatch patch_from_json(const Json& j, const hal::ModemConfig& current);

/// Schema fields of a modem config, each optional.
std::vector<FieldSpec> modem_config_fields();
std::vector<FieldSpec> packet_fields();

}  // namespace rfq::pipeline
