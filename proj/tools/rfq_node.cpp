#include <unistd.h>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rfq/env/scenario.hpp"
#include "rfq/modules/builtins.hpp"
#include "rfq/rpc/transport.hpp"

namespace {

rfq::rpc::TcpListener* g_listener = nullptr;

void on_signal(int) {
  if (g_listener) g_listener->close();
  std::_Exit(0);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual RF dongle node: simulated radios, module pipeline and framed RPC"};
  std::string scenario_path;
  std::string transport = "stdio";
  std::string log_level;
  std::string modules;
  std::string clock = "realtime";
  rfq::Micros step_us = 100;
  bool print_schema = false;
  app.add_option("--scenario", scenario_path, "Scenario JSON describing the RF environment")->check(CLI::ExistingFile);
  app.add_option("--transport", transport, "stdio or tcp:<port>");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off (default: $RFQ_LOG or info)");
  app.add_option("--modules", modules, "Comma-separated built-in modules to load (default: all)");
  app.add_option("--step-us", step_us, "Virtual time per idle loop iteration")->check(CLI::PositiveNumber);
  app.add_option("--clock", clock, "realtime, fast or manual")
      ->check(CLI::IsMember({"realtime", "fast", "manual"}));
  app.add_flag("--print-schema", print_schema, "Print the schema document and exit");
  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("rfq");
  spdlog::set_default_logger(logger);
  if (log_level.empty()) {
    if (const char* env = std::getenv("RFQ_LOG")) log_level = env;
  }
  spdlog::set_level(log_level.empty() ? spdlog::level::info : spdlog::level::from_str(log_level));

  try {
    rfq::env::EnvScenario scenario;
    if (!scenario_path.empty()) scenario = rfq::env::load_scenario_file(scenario_path);
    rfq::env::RfEnvironment env(scenario.noise_model());
    rfq::env::apply_scenario(scenario, env);

    auto mode = rfq::rpc::clock_mode_from_string(clock);
    rfq::pipeline::NodeOptions opts;
    opts.step_us = step_us;
    opts.manual_clock = mode == rfq::rpc::ClockMode::kManual;
    rfq::pipeline::Node node(env, opts);
    rfq::modules::register_builtins(node, split_list(modules));

    if (print_schema) {
      std::cout << node.schema().dump(2) << "\n";
      return 0;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::signal(SIGPIPE, SIG_IGN);

    rfq::rpc::NodeRunner runner(node, mode);
    runner.start();
    if (transport == "stdio") {
      rfq::rpc::FdStream stream(STDIN_FILENO, STDOUT_FILENO, false);
      auto stats = rfq::rpc::Session(node, stream).run();
      spdlog::info("stdio session closed: {} frames in, {} out, {} framing errors", stats.frames_in,
                   stats.frames_out, stats.framing_errors);
    } else if (transport.starts_with("tcp:")) {
      auto port = static_cast<std::uint16_t>(std::stoi(transport.substr(4)));
      rfq::rpc::TcpListener listener(port);
      g_listener = &listener;
      spdlog::info("listening on 127.0.0.1:{}", listener.port());
      while (auto stream = listener.accept()) {
        spdlog::info("host connected");
        auto stats = rfq::rpc::Session(node, *stream).run();
        spdlog::info("host disconnected: {} frames in, {} out, {} framing errors", stats.frames_in,
                     stats.frames_out, stats.framing_errors);
      }
    } else {
      throw rfq::Error(rfq::ErrorCode::kInvalidArgument, "transport must be stdio or tcp:<port>");
    }
    runner.stop();
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
