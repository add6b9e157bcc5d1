#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rfq/pipeline/node.hpp"
#include "rfq/rpc/frame.hpp"

namespace rfq::rpc {

enum class Direction { kIn, kOut };

const char* to_string(Direction d);

struct Envelope {
  Direction direction = Direction::kIn;
  pipeline::Message message;  // topic without the rfquack/<dir>/ prefix

  bool operator==(const Envelope&) const = default;
};

/// Sorted keys, no whitespace.
std::string canonical(const pipeline::Json& doc);

Bytes encode(const Envelope& e);
/// Throws kFraming for a topic outside rfquack/in|out/<module>/<name> and
/// kSchema for a payload that is not a JSON object.
Envelope decode(const RawFrame& f);

/// Topic catalog built from a get_schema document.
class SchemaCatalog {
 public:
  explicit SchemaCatalog(const pipeline::Json& schema);

  const pipeline::MessageSpec* find(Direction d, const std::string& topic) const;
  /// Throws kUnknownTopic or kSchema (unknown/missing/mistyped fields).
  void validate(const Envelope& e) const;

  std::vector<std::pair<Direction, std::string>> topics() const;
  std::size_t size() const { return in_.size() + out_.size(); }

 private:
  std::map<std::string, pipeline::MessageSpec> in_;
  std::map<std::string, pipeline::MessageSpec> out_;
};

}  // namespace rfq::rpc
