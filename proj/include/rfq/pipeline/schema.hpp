#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rfq::pipeline {

using Json = nlohmann::json;

enum class FieldType {
  kBool,
  kInt,
  kNumber,
  kString,
  kHex,      // bytes, lowercase hex text on the wire
  kEnum,     // string restricted to `values`
  kObject,   // free-form object
  kArray,    // array of `item` elements
};

const char* to_string(FieldType t);
FieldType field_type_from_string(const std::string& s);

struct FieldSpec {
  std::string name;
  FieldType type = FieldType::kString;
  bool optional = false;
  std::vector<std::string> values;  // kEnum only
  FieldType item = FieldType::kString;  // kArray only
};

/// An inbound verb or an outbound message kind with its payload fields.
struct MessageSpec {
  std::string name;
  std::vector<FieldSpec> fields;
};

struct ModuleSchema {
  std::string module;
  std::vector<MessageSpec> commands;  // rfquack/in/<module>/<verb>
  std::vector<MessageSpec> events;    // rfquack/out/<module>/<kind>
};

/// Throws Error(kSchema) on unknown fields, missing required fields or
/// type mismatches.
void validate(const MessageSpec& spec, const Json& payload);

Json to_json(const FieldSpec& f);
Json to_json(const MessageSpec& m);
Json to_json(const ModuleSchema& s);
MessageSpec message_spec_from_json(const Json& j);

/// Reply and error payloads shared by every module.
MessageSpec reply_spec();
MessageSpec error_spec();

/// The nine packet-modification operations, in wire order.
const std::vector<std::string>& op_names();

}  // namespace rfq::pipeline
