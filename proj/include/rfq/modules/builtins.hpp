#pragma once

#include <string>
#include <vector>

#include "rfq/pipeline/node.hpp"

namespace rfq::modules {

/// Names of the built-in modules in their default hook order.
const std::vector<std::string>& builtin_module_names();

/// Registers the named built-ins (all of them when `names` is empty) in the
/// default order. Unknown names throw kInvalidArgument.
void register_builtins(pipeline::Node& node, const std::vector<std::string>& names = {});

}  // namespace rfq::modules
