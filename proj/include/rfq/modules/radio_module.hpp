#pragma once

#include "rfq/hal/modem_config.hpp"
#include "rfq/pipeline/node.hpp"

namespace rfq::modules {

/// Radio manager for one frontend: owns its registration with the node's
/// radio proxy and exposes the uniform radio API as commands.
class RadioModule : public pipeline::Module {
 public:
  RadioModule(std::string name, hal::FrontendProfile profile)
      : Module(std::move(name)), profile_(std::move(profile)) {}

  void on_init(pipeline::Node& node) override;
  pipeline::Json on_user_command(pipeline::Node& node, const std::string& verb,
                                 const pipeline::Json& args) override;
  pipeline::ModuleSchema schema() const override;

 private:
  pipeline::Json status(pipeline::Node& node) const;

  hal::FrontendProfile profile_;
};

}  // namespace rfq::modules
