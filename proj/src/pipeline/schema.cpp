#include "rfq/pipeline/schema.hpp"

#include <algorithm>

#include "rfq/common.hpp"

namespace rfq::pipeline {

const char* to_string(FieldType t) {
  switch (t) {
    case FieldType::kBool: return "bool";
    case FieldType::kInt: return "int";
    case FieldType::kNumber: return "number";
    case FieldType::kString: return "string";
    case FieldType::kHex: return "bytes";
    case FieldType::kEnum: return "enum";
    case FieldType::kObject: return "object";
    case FieldType::kArray: return "array";
  }
  return "string";
}

FieldType field_type_from_string(const std::string& s) {
  for (auto t : {FieldType::kBool, FieldType::kInt, FieldType::kNumber, FieldType::kString,
                 FieldType::kHex, FieldType::kEnum, FieldType::kObject, FieldType::kArray}) {
    if (s == to_string(t)) return t;
  }
  throw Error(ErrorCode::kSchema, "unknown field type: " + s);
}

namespace {

bool is_hex(const std::string& s) {
  if (s.size() % 2) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

bool type_ok(FieldType t, const Json& v, const FieldSpec& f) {
  switch (t) {
    case FieldType::kBool: return v.is_boolean();
    case FieldType::kInt:
      if (v.is_number_integer()) return true;
      return v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>()));
    case FieldType::kNumber: return v.is_number();
    case FieldType::kString: return v.is_string();
    case FieldType::kHex: return v.is_string() && is_hex(v.get<std::string>());
    case FieldType::kEnum:
      return v.is_string() &&
             std::find(f.values.begin(), f.values.end(), v.get<std::string>()) != f.values.end();
    case FieldType::kObject: return v.is_object();
    case FieldType::kArray:
      if (!v.is_array()) return false;
      for (const auto& item : v) {
        if (!type_ok(f.item, item, f)) return false;
      }
      return true;
  }
  return false;
}

}  // namespace

void validate(const MessageSpec& spec, const Json& payload) {
  if (payload.is_null()) {
    validate(spec, Json::object());
    return;
  }
  if (!payload.is_object()) {
    throw Error(ErrorCode::kSchema, spec.name + ": payload must be an object");
  }
  for (const auto& [key, value] : payload.items()) {
    auto it = std::find_if(spec.fields.begin(), spec.fields.end(),
                           [&](const FieldSpec& f) { return f.name == key; });
    if (it == spec.fields.end()) {
      throw Error(ErrorCode::kSchema, spec.name + ": unknown field '" + key + "'");
    }
    if (!type_ok(it->type, value, *it)) {
      throw Error(ErrorCode::kSchema, spec.name + ": field '" + key + "' must be " +
                                          to_string(it->type));
    }
  }
  for (const auto& f : spec.fields) {
    if (!f.optional && !payload.contains(f.name)) {
      throw Error(ErrorCode::kSchema, spec.name + ": missing field '" + f.name + "'");
    }
  }
}

Json to_json(const FieldSpec& f) {
  Json j{{"name", f.name}, {"type", to_string(f.type)}, {"optional", f.optional}};
  if (f.type == FieldType::kEnum) j["values"] = f.values;
  if (f.type == FieldType::kArray) j["item"] = to_string(f.item);
  return j;
}

Json to_json(const MessageSpec& m) {
  Json fields = Json::array();
  for (const auto& f : m.fields) fields.push_back(to_json(f));
  return {{"name", m.name}, {"fields", fields}};
}

Json to_json(const ModuleSchema& s) {
  Json commands = Json::array();
  for (const auto& c : s.commands) commands.push_back(to_json(c));
  Json events = Json::array();
  for (const auto& e : s.events) events.push_back(to_json(e));
  return {{"module", s.module}, {"commands", commands}, {"events", events}};
}

MessageSpec message_spec_from_json(const Json& j) {
  try {
    MessageSpec m{j.at("name").get<std::string>(), {}};
    for (const auto& f : j.at("fields")) {
      FieldSpec spec{f.at("name").get<std::string>(), field_type_from_string(f.at("type").get<std::string>()),
                     f.value("optional", false)};
      if (f.contains("values")) spec.values = f["values"].get<std::vector<std::string>>();
      if (f.contains("item")) spec.item = field_type_from_string(f["item"].get<std::string>());
      m.fields.push_back(std::move(spec));
    }
    return m;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("malformed message spec: ") + e.what());
  }
}

MessageSpec reply_spec() {
  return {"reply", {{"verb", FieldType::kString}, {"result", FieldType::kObject}}};
}

MessageSpec error_spec() {
  FieldSpec code{"code", FieldType::kEnum};
  for (auto c : {ErrorCode::kInvalidArgument, ErrorCode::kOutOfRange, ErrorCode::kUnsupported,
                 ErrorCode::kUnknownRadio, ErrorCode::kUnknownActor, ErrorCode::kUnknownTopic,
                 ErrorCode::kDuplicate, ErrorCode::kBadState, ErrorCode::kFraming,
                 ErrorCode::kSchema, ErrorCode::kNotImplemented}) {
    code.values.push_back(rfq::to_string(c));
  }
  code.values.push_back("internal");
  return {"error", {{"verb", FieldType::kString}, code, {"message", FieldType::kString}}};
}

const std::vector<std::string>& op_names() {
  static const std::vector<std::string> ops{"AND",    "OR",      "XOR",    "NOT",   "SLEFT",
                                            "SRIGHT", "PREPEND", "APPEND", "INSERT"};
  return ops;
}

}  // namespace rfq::pipeline
