#include "rfq/rpc/codec.hpp"

namespace rfq::rpc {

using pipeline::Json;

const char* to_string(Direction d) { return d == Direction::kIn ? "in" : "out"; }

std::string canonical(const Json& doc) { return doc.dump(); }

Bytes encode(const Envelope& e) {
  std::string topic = std::string("rfquack/") + to_string(e.direction) + "/" + e.message.topic;
  return encode_frame(topic, canonical(e.message.payload));
}

Envelope decode(const RawFrame& f) {
  Envelope e;
  std::string_view rest;
  if (f.topic.starts_with("rfquack/in/")) {
    e.direction = Direction::kIn;
    rest = std::string_view(f.topic).substr(11);
  } else if (f.topic.starts_with("rfquack/out/")) {
    e.direction = Direction::kOut;
    rest = std::string_view(f.topic).substr(12);
  } else {
    throw Error(ErrorCode::kFraming, "topic outside rfquack/in|out: " + f.topic);
  }
  auto slash = rest.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == rest.size() ||
      rest.find('/', slash + 1) != std::string_view::npos) {
    throw Error(ErrorCode::kFraming, "topic must be rfquack/<dir>/<module>/<name>: " + f.topic);
  }
  e.message.topic = std::string(rest);
  try {
    e.message.payload = Json::parse(f.payload);
  } catch (const Json::exception& ex) {
    throw Error(ErrorCode::kSchema, std::string("payload parse error: ") + ex.what());
  }
  if (!e.message.payload.is_object()) throw Error(ErrorCode::kSchema, "payload must be an object");
  return e;
}

SchemaCatalog::SchemaCatalog(const Json& schema) {
  std::vector<pipeline::MessageSpec> common;
  for (const auto& c : schema.at("common")) common.push_back(pipeline::message_spec_from_json(c));
  for (const auto& m : schema.at("modules")) {
    auto module = m.at("module").get<std::string>();
    for (const auto& c : m.at("commands")) {
      auto spec = pipeline::message_spec_from_json(c);
      in_[module + "/" + spec.name] = spec;
    }
    for (const auto& ev : m.at("events")) {
      auto spec = pipeline::message_spec_from_json(ev);
      out_[module + "/" + spec.name] = spec;
    }
    for (const auto& spec : common) out_[module + "/" + spec.name] = spec;
  }
}

const pipeline::MessageSpec* SchemaCatalog::find(Direction d, const std::string& topic) const {
  const auto& table = d == Direction::kIn ? in_ : out_;
  auto it = table.find(topic);
  return it == table.end() ? nullptr : &it->second;
}

void SchemaCatalog::validate(const Envelope& e) const {
  const auto* spec = find(e.direction, e.message.topic);
  if (!spec) {
    throw Error(ErrorCode::kUnknownTopic,
                std::string("no ") + to_string(e.direction) + " topic " + e.message.topic);
  }
  pipeline::validate(*spec, e.message.payload);
}

std::vector<std::pair<Direction, std::string>> SchemaCatalog::topics() const {
  std::vector<std::pair<Direction, std::string>> out;
  for (const auto& [t, s] : in_) out.emplace_back(Direction::kIn, t);
  for (const auto& [t, s] : out_) out.emplace_back(Direction::kOut, t);
  return out;
}

}  // namespace rfq::rpc
