#include "rfq/modules/packet_mod.hpp"

#include <spdlog/spdlog.h>

namespace rfq::modules {

using pipeline::FieldType;
using pipeline::Json;

const char* to_string(Op op) {
  return pipeline::op_names()[static_cast<std::size_t>(op)].c_str();
}

Op op_from_string(const std::string& s) {
  const auto& names = pipeline::op_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == s) return static_cast<Op>(i);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown operation: " + s);
}

bool is_byte_op(Op op) {
  return op != Op::kPrepend && op != Op::kAppend && op != Op::kInsert;
}

void check(const PacketModification& m) {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::kInvalidArgument, why); };
  bool wants_operand = is_byte_op(m.operation) && m.operation != Op::kNot;
  if (wants_operand && !m.operand) bad(std::string(to_string(m.operation)) + " needs an operand");
  if (!wants_operand && m.operand) bad(std::string(to_string(m.operation)) + " takes no operand");
  if (is_byte_op(m.operation)) {
    if (m.position.has_value() == m.content.has_value()) {
      bad("byte operations need exactly one of position and content");
    }
    if (m.payload) bad("payload is only valid for PREPEND, APPEND and INSERT");
  } else {
    if (!m.payload) bad(std::string(to_string(m.operation)) + " needs a payload");
    if (m.content) bad("content is only valid for byte operations");
    if (m.operation == Op::kInsert && !m.position) bad("INSERT needs a position");
    if (m.operation != Op::kInsert && m.position) {
      bad(std::string(to_string(m.operation)) + " takes no position");
    }
  }
  if (m.pattern) {
    try {
      std::regex re(*m.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      bad("bad pattern '" + *m.pattern + "': " + e.what());
    }
  }
}

namespace {

std::uint8_t byte_op(Op op, std::uint8_t b, std::uint8_t operand) {
  switch (op) {
    case Op::kAnd: return b & operand;
    case Op::kOr: return b | operand;
    case Op::kXor: return b ^ operand;
    case Op::kNot: return static_cast<std::uint8_t>(~b);
    case Op::kShiftLeft: return operand >= 8 ? 0 : static_cast<std::uint8_t>(b << operand);
    case Op::kShiftRight: return operand >= 8 ? 0 : static_cast<std::uint8_t>(b >> operand);
    default: return b;
  }
}

}  // namespace

ModResult apply_modification(Bytes& data, const PacketModification& m) {
  if (m.pattern) {
    std::regex re(*m.pattern, std::regex::ECMAScript);
    if (!std::regex_search(to_hex(data), re)) return {ModOutcome::kGatedOut, {}};
  }
  if (is_byte_op(m.operation)) {
    std::uint8_t operand = m.operand.value_or(0);
    if (m.position) {
      if (*m.position >= data.size()) {
        return {ModOutcome::kSkipped, "position " + std::to_string(*m.position) +
                                          " out of range for " + std::to_string(data.size()) +
                                          "-byte packet"};
      }
      data[*m.position] = byte_op(m.operation, data[*m.position], operand);
      return {};
    }
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i] == *m.content) hits.push_back(i);
    }
    for (auto i : hits) data[i] = byte_op(m.operation, data[i], operand);
    return {};
  }
  const Bytes& p = *m.payload;
  switch (m.operation) {
    case Op::kPrepend: data.insert(data.begin(), p.begin(), p.end()); break;
    case Op::kAppend: data.insert(data.end(), p.begin(), p.end()); break;
    case Op::kInsert:
      if (*m.position > data.size()) {
        return {ModOutcome::kSkipped, "position " + std::to_string(*m.position) +
                                          " out of range for " + std::to_string(data.size()) +
                                          "-byte packet"};
      }
      data.insert(data.begin() + static_cast<std::ptrdiff_t>(*m.position), p.begin(), p.end());
      break;
    default: break;
  }
  return {};
}

void ModificationEngine::add(PacketModification mod) {
  check(mod);
  mods_.push_back(std::move(mod));
}

std::vector<std::string> ModificationEngine::apply(Bytes& data) const {
  std::vector<std::string> warnings;
  for (const auto& m : mods_) {
    auto r = apply_modification(data, m);
    if (r.outcome == ModOutcome::kSkipped) warnings.push_back(std::move(r.warning));
  }
  return warnings;
}

Json to_json(const PacketModification& m) {
  Json j{{"operation", to_string(m.operation)}};
  if (m.position) j["position"] = *m.position;
  if (m.content) j["content"] = *m.content;
  if (m.operand) j["operand"] = *m.operand;
  if (m.pattern) j["pattern"] = *m.pattern;
  if (m.payload) j["payload"] = to_hex(*m.payload);
  return j;
}

PacketModification modification_from_json(const Json& j) {
  auto byte = [&](const char* key) -> std::uint8_t {
    auto v = j.at(key).get<long long>();
    if (v < 0 || v > 0xFF) throw Error(ErrorCode::kOutOfRange, std::string(key) + " must be a byte");
    return static_cast<std::uint8_t>(v);
  };
  PacketModification m;
  m.operation = op_from_string(j.at("operation").get<std::string>());
  if (j.contains("position")) {
    auto v = j["position"].get<long long>();
    if (v < 0) throw Error(ErrorCode::kOutOfRange, "position must be >= 0");
    m.position = static_cast<std::size_t>(v);
  }
  if (j.contains("content")) m.content = byte("content");
  if (j.contains("operand")) m.operand = byte("operand");
  if (j.contains("pattern")) m.pattern = j["pattern"].get<std::string>();
  if (j.contains("payload")) m.payload = from_hex(j["payload"].get<std::string>());
  return m;
}

pipeline::Verdict PacketModModule::on_packet_received(pipeline::Node& node, hal::Packet& pkt) {
  for (auto& w : engine_.apply(pkt.data)) {
    spdlog::warn("packet_mod: {}", w);
    node.emit(name(), "error", pipeline::error_payload("apply", "out_of_range", w));
  }
  return pipeline::Verdict::kPass;
}

Json PacketModModule::on_user_command(pipeline::Node& node, const std::string& verb,
                                      const Json& args) {
  if (verb == "add") {
    engine_.add(modification_from_json(args));
    return {{"mods", engine_.mods().size()}};
  }
  if (verb == "reset") {
    engine_.reset();
    return {{"mods", 0}};
  }
  if (verb == "list") {
    Json mods = Json::array();
    for (const auto& m : engine_.mods()) mods.push_back(to_json(m));
    return {{"mods", mods}};
  }
  return Module::on_user_command(node, verb, args);
}

pipeline::ModuleSchema PacketModModule::schema() const {
  return {name(),
          {{"add",
            {{"position", FieldType::kInt, true},
             {"content", FieldType::kInt, true},
             {"operation", FieldType::kEnum, false, pipeline::op_names()},
             {"operand", FieldType::kInt, true},
             {"pattern", FieldType::kString, true},
             {"payload", FieldType::kHex, true}}},
           {"reset", {}},
           {"list", {}}},
          {}};
}

}  // namespace rfq::modules
