#pragma once

#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "rfq/common.hpp"
#include "rfq/pipeline/node.hpp"

namespace rfq::modules {

enum class Op { kAnd, kOr, kXor, kNot, kShiftLeft, kShiftRight, kPrepend, kAppend, kInsert };

const char* to_string(Op op);
Op op_from_string(const std::string& s);
bool is_byte_op(Op op);

struct PacketModification {
  std::optional<std::size_t> position;
  std::optional<std::uint8_t> content;  // apply at every index holding this byte
  Op operation = Op::kXor;
  std::optional<std::uint8_t> operand;
  std::optional<std::string> pattern;  // regex gate over the hex text
  std::optional<Bytes> payload;

  bool operator==(const PacketModification&) const = default;
};

/// Throws kInvalidArgument unless the field combination is well formed:
/// byte ops take exactly one of position/content, operands only where the
/// op uses one, payload only for PREPEND/APPEND/INSERT, INSERT needs a
/// position, and the pattern compiles.
void check(const PacketModification& mod);

enum class ModOutcome { kApplied, kGatedOut, kSkipped };

struct ModResult {
  ModOutcome outcome = ModOutcome::kApplied;
  std::string warning;
};

/// Applies one rule to `data` in place.
ModResult apply_modification(Bytes& data, const PacketModification& mod);

/// Ordered rule list; applying it is a left fold of apply_modification.
class ModificationEngine {
 public:
  void add(PacketModification mod);
  void reset() { mods_.clear(); }
  const std::vector<PacketModification>& mods() const { return mods_; }

  /// Returns the warnings of skipped rules.
  std::vector<std::string> apply(Bytes& data) const;

 private:
  std::vector<PacketModification> mods_;
};

pipeline::Json to_json(const PacketModification& mod);
PacketModification modification_from_json(const pipeline::Json& j);

class PacketModModule : public pipeline::Module {
 public:
  PacketModModule() : Module("packet_mod") {}

  pipeline::Verdict on_packet_received(pipeline::Node& node, hal::Packet& pkt) override;
  pipeline::Json on_user_command(pipeline::Node& node, const std::string& verb,
                                 const pipeline::Json& args) override;
  pipeline::ModuleSchema schema() const override;

  ModificationEngine& engine() { return engine_; }

 private:
  ModificationEngine engine_;
};

}  // namespace rfq::modules
