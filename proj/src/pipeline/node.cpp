#include "rfq/pipeline/node.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "rfq/pipeline/json_codec.hpp"

namespace rfq::pipeline {

Json Module::on_user_command(Node&, const std::string& verb, const Json&) {
  throw Error(ErrorCode::kUnknownTopic, name_ + " has no command '" + verb + "'");
}

Json error_payload(const std::string& verb, const std::string& code, const std::string& message) {
  return {{"verb", verb}, {"code", code}, {"message", message}};
}

Node::Node(env::RfEnvironment& env, NodeOptions opts)
    : env_(env),
      opts_(opts),
      radios_(env),
      rx_queue_(opts.rx_queue_capacity, DropPolicy::kDropNewest),
      repeater_queue_(opts.repeater_queue_capacity, DropPolicy::kDropNewest),
      host_queue_(opts.host_queue_capacity, DropPolicy::kDropOldest) {}

Node::~Node() = default;

Module& Node::register_module(std::unique_ptr<Module> m, std::optional<int> priority) {
  if (!m) throw Error(ErrorCode::kInvalidArgument, "null module");
  if (m->name() == "node" || find_module(m->name())) {
    throw Error(ErrorCode::kDuplicate, "duplicate module name: " + m->name());
  }
  std::size_t order = modules_.size();
  int prio = priority.value_or(static_cast<int>(order));
  Module* raw = m.get();
  modules_.push_back({std::move(m), prio, order});
  std::stable_sort(modules_.begin(), modules_.end(), [](const Entry& a, const Entry& b) {
    return a.priority != b.priority ? a.priority < b.priority : a.order < b.order;
  });
  try {
    trace(raw->name(), "onInit");
    raw->on_init(*this);
  } catch (...) {
    modules_.erase(std::find_if(modules_.begin(), modules_.end(),
                                [&](const Entry& e) { return e.module.get() == raw; }));
    throw;
  }
  spdlog::debug("registered module {} (priority {})", raw->name(), prio);
  return *raw;
}

Module* Node::find_module(const std::string& name) {
  for (auto& e : modules_) {
    if (e.module->name() == name) return e.module.get();
  }
  return nullptr;
}

std::vector<std::string> Node::module_names() const {
  std::vector<std::string> out;
  for (const auto& e : modules_) out.push_back(e.module->name());
  return out;
}

void Node::trace(const std::string& module, const char* hook) {
  if (tracer_) tracer_(module, hook);
}

void Node::module_error(Module& m, const char* hook, const std::exception& e) {
  ++stats_.module_errors;
  spdlog::warn("module {} failed in {}: {}", m.name(), hook, e.what());
  const auto* err = dynamic_cast<const Error*>(&e);
  emit(m.name(), "error",
       error_payload(hook, err ? rfq::to_string(err->code()) : "internal", e.what()));
}

Disposition Node::dispatch_packet(hal::Packet pkt) {
  ++stats_.packets_received;
  for (auto& e : modules_) {
    Module& m = *e.module;
    if (!m.enabled()) continue;
    Verdict v = Verdict::kPass;
    try {
      trace(m.name(), "onPacketReceived");
      v = m.on_packet_received(*this, pkt);
    } catch (const std::exception& ex) {
      module_error(m, "onPacketReceived", ex);
      v = Verdict::kDrop;
    }
    if (v == Verdict::kDrop) {
      ++stats_.packets_dropped;
      return Disposition::kDropped;
    }
    if (v == Verdict::kConsume) {
      ++stats_.packets_consumed;
      return Disposition::kConsumed;
    }
  }
  if (!rx_queue_.push(std::move(pkt))) {
    ++stats_.rx_queue_drops;
    return Disposition::kDropped;
  }
  return Disposition::kForwarded;
}

void Node::high_priority_pass() {
  for (const auto& name : radios_.names()) {
    for (auto& pkt : radios_.at(name).poll_reception()) dispatch_packet(std::move(pkt));
  }
}

void Node::low_priority_pass() {
  while (auto pkt = rx_queue_.pop()) {
    for (auto& e : modules_) {
      Module& m = *e.module;
      if (!m.enabled()) continue;
      try {
        trace(m.name(), "afterPacketReceived");
        m.after_packet_received(*this, *pkt);
      } catch (const std::exception& ex) {
        module_error(m, "afterPacketReceived", ex);
      }
    }
    ++stats_.packets_forwarded;
    push_host({pkt->rx_radio + "/packet", to_json(*pkt)});
  }
  for (auto& e : modules_) {
    Module& m = *e.module;
    if (!m.enabled()) continue;
    try {
      trace(m.name(), "onLoop");
      m.on_loop(*this);
    } catch (const std::exception& ex) {
      module_error(m, "onLoop", ex);
    }
  }
}

void Node::run_loop_iteration() {
  process_commands();
  Micros t0 = env_.now();
  high_priority_pass();
  low_priority_pass();
  ++stats_.loops;
  if (!opts_.manual_clock) {
    Micros charged = env_.now() - t0;
    if (charged < opts_.step_us) env_.advance(opts_.step_us - charged);
  }
}

void Node::run_for(Micros us) {
  Micros target = env_.now() + us;
  while (env_.now() < target) {
    Micros t0 = env_.now();
    high_priority_pass();
    low_priority_pass();
    ++stats_.loops;
    Micros charged = env_.now() - t0;
    Micros step = std::min(opts_.step_us, target - env_.now());
    if (charged < step) env_.advance(step - charged);
    if (env_.now() == t0) env_.advance(1);
  }
}

void Node::submit_command(std::string topic, Json payload) {
  std::lock_guard lock(cmd_mu_);
  pending_commands_.push_back({std::move(topic), std::move(payload)});
}

void Node::process_commands() {
  std::vector<Message> batch;
  {
    std::lock_guard lock(cmd_mu_);
    batch.swap(pending_commands_);
  }
  for (auto& c : batch) handle_user_command(c.topic, c.payload);
}

std::vector<Message> Node::handle_user_command(const std::string& topic, const Json& payload) {
  ++stats_.commands;
  std::vector<Message> out;
  auto send = [&](Message m) {
    out.push_back(m);
    push_host(std::move(m));
  };
  auto slash = topic.find('/');
  if (slash == std::string::npos || topic.find('/', slash + 1) != std::string::npos) {
    send({"node/error", error_payload(topic, "unknown_topic", "malformed topic: " + topic)});
    return out;
  }
  std::string module = topic.substr(0, slash);
  std::string verb = topic.substr(slash + 1);
  Module* m = module == "node" ? nullptr : find_module(module);
  if (module != "node" && !m) {
    send({"node/error", error_payload(topic, "unknown_topic", "unknown module: " + module)});
    return out;
  }
  try {
    auto spec = find_command(module, verb);
    if (!spec) {
      throw Error(ErrorCode::kUnknownTopic, module + " has no command '" + verb + "'");
    }
    Json args = payload.is_null() ? Json::object() : payload;
    validate(*spec, args);
    Json result;
    if (m) {
      trace(module, "onUserCommand");
      result = m->on_user_command(*this, verb, args);
    } else {
      result = node_command(verb, args);
    }
    if (!result.is_object()) result = Json{{"value", result}};
    send({module + "/reply", {{"verb", verb}, {"result", result}}});
  } catch (const Error& e) {
    send({module + "/error", error_payload(verb, rfq::to_string(e.code()), e.what())});
  } catch (const std::exception& e) {
    ++stats_.module_errors;
    spdlog::warn("command {} failed: {}", topic, e.what());
    send({module + "/error", error_payload(verb, "internal", e.what())});
  }
  return out;
}

void Node::emit(const std::string& module, const std::string& kind, Json payload) {
  push_host({module + "/" + kind, std::move(payload)});
}

void Node::push_host(Message m) {
  {
    std::lock_guard lock(host_mu_);
    if (!host_queue_.push(std::move(m))) ++stats_.host_queue_drops;
  }
  host_cv_.notify_one();
}

std::vector<Message> Node::drain_host() {
  std::lock_guard lock(host_mu_);
  std::vector<Message> out;
  while (auto m = host_queue_.pop()) out.push_back(std::move(*m));
  return out;
}

std::optional<Message> Node::pop_host(std::chrono::milliseconds wait) {
  std::unique_lock lock(host_mu_);
  host_cv_.wait_for(lock, wait, [&] { return !host_queue_.empty(); });
  return host_queue_.pop();
}

void Node::wake_host_readers() { host_cv_.notify_all(); }

ModuleSchema Node::node_schema() const {
  ModuleSchema s{"node", {}, {}};
  s.commands = {
      {"get_schema", {}},
      {"status", {}},
      {"list_modules", {}},
      {"enable", {{"module", FieldType::kString}}},
      {"disable", {{"module", FieldType::kString}}},
      {"run", {{"us", FieldType::kInt}}},
  };
  return s;
}

std::optional<MessageSpec> Node::find_command(const std::string& module,
                                              const std::string& verb) const {
  ModuleSchema s;
  if (module == "node") {
    s = node_schema();
  } else {
    auto it = std::find_if(modules_.begin(), modules_.end(),
                           [&](const Entry& e) { return e.module->name() == module; });
    if (it == modules_.end()) return std::nullopt;
    s = it->module->schema();
  }
  for (auto& c : s.commands) {
    if (c.name == verb) return std::move(c);
  }
  return std::nullopt;
}

Json Node::schema() const {
  Json modules = Json::array();
  modules.push_back(to_json(node_schema()));
  for (const auto& e : modules_) modules.push_back(to_json(e.module->schema()));
  return {{"version", 1},
          {"prefix", {{"in", "rfquack/in"}, {"out", "rfquack/out"}}},
          {"ops", op_names()},
          {"common", {to_json(reply_spec()), to_json(error_spec())}},
          {"modules", modules}};
}

Json Node::node_command(const std::string& verb, const Json& args) {
  if (verb == "get_schema") return schema();
  if (verb == "list_modules") {
    Json list = Json::array();
    for (const auto& e : modules_) {
      list.push_back({{"name", e.module->name()}, {"enabled", e.module->enabled()},
                      {"priority", e.priority}});
    }
    return {{"modules", list}};
  }
  if (verb == "status") {
    return {{"nowUs", env_.now()},
            {"loops", stats_.loops},
            {"packetsReceived", stats_.packets_received},
            {"packetsDropped", stats_.packets_dropped},
            {"packetsConsumed", stats_.packets_consumed},
            {"packetsForwarded", stats_.packets_forwarded},
            {"rxQueueDrops", stats_.rx_queue_drops},
            {"hostQueueDrops", stats_.host_queue_drops},
            {"moduleErrors", stats_.module_errors},
            {"commands", stats_.commands},
            {"radios", radios_.names()}};
  }
  if (verb == "enable" || verb == "disable") {
    auto name = args.at("module").get<std::string>();
    Module* m = find_module(name);
    if (!m) throw Error(ErrorCode::kUnknownTopic, "unknown module: " + name);
    m->set_enabled(verb == "enable");
    return {{"module", name}, {"enabled", m->enabled()}};
  }
  if (verb == "run") {
    auto us = args.at("us").get<long long>();
    if (us < 0) throw Error(ErrorCode::kInvalidArgument, "us must be >= 0");
    run_for(us);
    return {{"nowUs", env_.now()}};
  }
  throw Error(ErrorCode::kUnknownTopic, "node has no command '" + verb + "'");
}

}  // namespace rfq::pipeline
