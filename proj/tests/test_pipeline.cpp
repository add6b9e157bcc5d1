#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rfq/env/scenario.hpp"
#include "rfq/modules/builtins.hpp"
#include "rfq/modules/radio_module.hpp"
#include "rfq/modules/repeater.hpp"

using namespace rfq;
using pipeline::Json;
using pipeline::Node;
using pipeline::Verdict;

namespace {

class Probe : public pipeline::Module {
 public:
  explicit Probe(std::string name, Verdict verdict = Verdict::kPass)
      : Module(std::move(name)), verdict_(verdict) {}

  Verdict on_packet_received(Node&, hal::Packet& pkt) override {
    pkt.data.push_back(static_cast<std::uint8_t>(name()[0]));
    return verdict_;
  }
  Json on_user_command(Node& node, const std::string& verb, const Json& args) override {
    if (verb == "ping") return {{"pong", args.value("n", 0)}};
    if (verb == "boom") throw std::runtime_error("boom");
    return Module::on_user_command(node, verb, args);
  }
  pipeline::ModuleSchema schema() const override {
    return {name(), {{"ping", {{"n", pipeline::FieldType::kInt, true}}}, {"boom", {}}}, {}};
  }

 private:
  Verdict verdict_;
};

class BadInit : public pipeline::Module {
 public:
  BadInit() : Module("bad") {}
  void on_init(Node&) override { throw Error(ErrorCode::kUnsupported, "no hardware"); }
};

class Thrower : public pipeline::Module {
 public:
  Thrower() : Module("thrower") {}
  Verdict on_packet_received(Node&, hal::Packet&) override {
    throw std::runtime_error("bad packet");
  }
};

hal::Packet packet(Bytes data, std::string radio = "radioA") {
  hal::Packet p;
  p.data = std::move(data);
  p.rx_radio = std::move(radio);
  return p;
}

struct Bench {
  env::RfEnvironment env;
  Node node;
  explicit Bench(pipeline::NodeOptions opts = {}) : node(env, opts) {}

  Json reply(const std::string& topic, const Json& args = Json::object()) {
    auto out = node.handle_user_command(topic, args);
    EXPECT_EQ(out.size(), 1u);
    return out.empty() ? Json() : out[0].payload;
  }
};

}  // namespace

TEST(Routing, ReplyCarriesVerbAndResult) {
  Bench b;
  b.node.register_module(std::make_unique<Probe>("alpha"));
  auto out = b.node.handle_user_command("alpha/ping", {{"n", 7}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].topic, "alpha/reply");
  EXPECT_EQ(out[0].payload, (Json{{"verb", "ping"}, {"result", {{"pong", 7}}}}));
  auto host = b.node.drain_host();
  ASSERT_EQ(host.size(), 1u);
  EXPECT_EQ(host[0], out[0]);
}

TEST(Routing, UnknownModuleAndMalformedTopicGoToNodeError) {
  Bench b;
  for (const std::string topic : {"ghost/ping", "noslash", "a/b/c"}) {
    auto out = b.node.handle_user_command(topic, Json::object());
    ASSERT_EQ(out.size(), 1u) << topic;
    EXPECT_EQ(out[0].topic, "node/error");
    EXPECT_EQ(out[0].payload["code"], "unknown_topic");
  }
}

TEST(Routing, UnknownVerbAndSchemaViolations) {
  Bench b;
  b.node.register_module(std::make_unique<Probe>("alpha"));
  auto e = b.reply("alpha/nope");
  EXPECT_EQ(e["code"], "unknown_topic");
  EXPECT_EQ(e["verb"], "nope");
  EXPECT_EQ(b.reply("alpha/ping", {{"n", "seven"}})["code"], "schema");
  EXPECT_EQ(b.reply("alpha/ping", {{"m", 1}})["code"], "schema");
  EXPECT_EQ(b.node.handle_user_command("alpha/ping", {{"m", 1}})[0].topic, "alpha/error");
}

TEST(Routing, HandlerExceptionBecomesInternalError) {
  Bench b;
  b.node.register_module(std::make_unique<Probe>("alpha"));
  auto out = b.node.handle_user_command("alpha/boom", Json::object());
  EXPECT_EQ(out[0].topic, "alpha/error");
  EXPECT_EQ(out[0].payload["code"], "internal");
}

TEST(Routing, NodeCommands) {
  Bench b;
  b.node.register_module(std::make_unique<Probe>("alpha"));
  b.node.register_module(std::make_unique<Probe>("beta"), -5);
  auto list = b.reply("node/list_modules")["result"]["modules"];
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0]["name"], "beta");
  EXPECT_EQ(list[1]["name"], "alpha");

  EXPECT_EQ(b.reply("node/disable", {{"module", "alpha"}})["result"]["enabled"], false);
  EXPECT_FALSE(b.node.find_module("alpha")->enabled());
  EXPECT_EQ(b.reply("node/enable", {{"module", "alpha"}})["result"]["enabled"], true);
  EXPECT_EQ(b.reply("node/enable", {{"module", "ghost"}})["code"], "unknown_topic");

  auto t0 = b.env.now();
  EXPECT_EQ(b.reply("node/run", {{"us", 5000}})["result"]["nowUs"], t0 + 5000);
  EXPECT_EQ(b.reply("node/run", {{"us", -1}})["code"], "invalid_argument");

  auto status = b.reply("node/status")["result"];
  EXPECT_EQ(status["nowUs"], b.env.now());
  EXPECT_GT(status["loops"].get<int>(), 0);
  EXPECT_EQ(status["commands"], 7);
}

TEST(Routing, SubmittedCommandsRunAtLoopBoundary) {
  Bench b;
  b.node.register_module(std::make_unique<Probe>("alpha"));
  b.node.submit_command("alpha/ping", {{"n", 1}});
  EXPECT_TRUE(b.node.drain_host().empty());
  b.node.run_loop_iteration();
  auto host = b.node.drain_host();
  ASSERT_EQ(host.size(), 1u);
  EXPECT_EQ(host[0].payload["result"]["pong"], 1);
}

TEST(Registry, DuplicateNamesRejected) {
  Bench b;
  b.node.register_module(std::make_unique<Probe>("alpha"));
  EXPECT_THROW(b.node.register_module(std::make_unique<Probe>("alpha")), Error);
  EXPECT_THROW(b.node.register_module(std::make_unique<Probe>("node")), Error);
}

TEST(Registry, FailingInitLeavesNoTrace) {
  Bench b;
  EXPECT_THROW(b.node.register_module(std::make_unique<BadInit>()), Error);
  EXPECT_EQ(b.node.find_module("bad"), nullptr);
  EXPECT_TRUE(b.node.module_names().empty());
}

TEST(Registry, UnknownBuiltinRejected) {
  Bench b;
  EXPECT_THROW(modules::register_builtins(b.node, {"radioA", "warp_drive"}), Error);
}

TEST(Hooks, OrderFollowsPriorityThenRegistration) {
  Bench b;
  std::vector<std::string> trace;
  b.node.set_tracer([&](const std::string& m, const std::string& h) { trace.push_back(m + ":" + h); });
  b.node.register_module(std::make_unique<Probe>("a"));
  b.node.register_module(std::make_unique<Probe>("b"));
  b.node.register_module(std::make_unique<Probe>("c"), -1);
  trace.clear();

  b.node.dispatch_packet(packet({0x01}));
  b.node.run_loop_iteration();
  std::vector<std::string> expected{
      "c:onPacketReceived",    "a:onPacketReceived",    "b:onPacketReceived",
      "c:afterPacketReceived", "a:afterPacketReceived", "b:afterPacketReceived",
      "c:onLoop",              "a:onLoop",              "b:onLoop"};
  EXPECT_EQ(trace, expected);

  auto host = b.node.drain_host();
  ASSERT_EQ(host.size(), 1u);
  EXPECT_EQ(host[0].topic, "radioA/packet");
  EXPECT_EQ(pipeline::packet_from_json(host[0].payload).data, (Bytes{0x01, 'c', 'a', 'b'}));
}

TEST(Hooks, DropAndConsumeStopTheChain) {
  Bench b;
  std::vector<std::string> seen;
  b.node.set_tracer([&](const std::string& m, const std::string& h) {
    if (h == "onPacketReceived") seen.push_back(m);
  });
  b.node.register_module(std::make_unique<Probe>("a", Verdict::kConsume));
  b.node.register_module(std::make_unique<Probe>("b"));
  EXPECT_EQ(b.node.dispatch_packet(packet({1})), pipeline::Disposition::kConsumed);
  EXPECT_EQ(seen, std::vector<std::string>{"a"});
  b.node.run_loop_iteration();
  EXPECT_TRUE(b.node.drain_host().empty());
  EXPECT_EQ(b.node.stats().packets_consumed, 1u);
}

TEST(Hooks, DisabledModuleIsSkipped) {
  Bench b;
  b.node.register_module(std::make_unique<Probe>("a", Verdict::kDrop));
  b.node.find_module("a")->set_enabled(false);
  EXPECT_EQ(b.node.dispatch_packet(packet({1})), pipeline::Disposition::kForwarded);
}

TEST(Hooks, ThrowingHookDropsPacketAndReports) {
  Bench b;
  b.node.register_module(std::make_unique<Thrower>());
  EXPECT_EQ(b.node.dispatch_packet(packet({1})), pipeline::Disposition::kDropped);
  auto host = b.node.drain_host();
  ASSERT_EQ(host.size(), 1u);
  EXPECT_EQ(host[0].topic, "thrower/error");
  EXPECT_EQ(host[0].payload["verb"], "onPacketReceived");
  EXPECT_EQ(b.node.stats().module_errors, 1u);
}

TEST(Queues, RxQueueDropsNewest) {
  pipeline::NodeOptions opts;
  opts.rx_queue_capacity = 2;
  Bench b(opts);
  EXPECT_EQ(b.node.dispatch_packet(packet({1})), pipeline::Disposition::kForwarded);
  EXPECT_EQ(b.node.dispatch_packet(packet({2})), pipeline::Disposition::kForwarded);
  EXPECT_EQ(b.node.dispatch_packet(packet({3})), pipeline::Disposition::kDropped);
  b.node.run_loop_iteration();
  auto host = b.node.drain_host();
  ASSERT_EQ(host.size(), 2u);
  EXPECT_EQ(pipeline::packet_from_json(host[0].payload).data, Bytes{1});
  EXPECT_EQ(pipeline::packet_from_json(host[1].payload).data, Bytes{2});
  EXPECT_EQ(b.node.stats().rx_queue_drops, 1u);
}

TEST(Queues, HostQueueDropsOldest) {
  pipeline::NodeOptions opts;
  opts.host_queue_capacity = 3;
  Bench b(opts);
  for (int i = 0; i < 5; ++i) b.node.emit("x", "tick", {{"i", i}});
  auto host = b.node.drain_host();
  ASSERT_EQ(host.size(), 3u);
  EXPECT_EQ(host[0].payload["i"], 2);
  EXPECT_EQ(host[2].payload["i"], 4);
  EXPECT_EQ(b.node.stats().host_queue_drops, 2u);
}

TEST(Queues, ClockAdvancesByStep) {
  pipeline::NodeOptions opts;
  opts.step_us = 250;
  Bench b(opts);
  b.node.run_loop_iteration();
  EXPECT_EQ(b.env.now(), 250);
  b.node.run_for(1000);
  EXPECT_EQ(b.env.now(), 1250);
}

TEST(Filter, Examples) {
  modules::PacketFilter f;
  EXPECT_TRUE(f.accepts(Bytes{0x55}));
  f.add({"^aaaa", false});
  EXPECT_TRUE(f.accepts(Bytes{0xAA, 0xAA, 0x12, 0x34}));
  EXPECT_FALSE(f.accepts(Bytes{0x55, 0x55, 0x12, 0x34}));
  f.add({"34$", true});
  EXPECT_FALSE(f.accepts(Bytes{0xAA, 0xAA, 0x12, 0x34}));
  EXPECT_TRUE(f.accepts(Bytes{0xAA, 0xAA, 0x12, 0x35}));
  EXPECT_THROW(f.add({"(", false}), Error);
  EXPECT_EQ(f.rules().size(), 2u);
}

TEST(Filter, NegationIsTheComplement) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto c = oracle::random_case(rng);
    auto p = oracle::random_pattern(rng, c.packet);
    modules::PacketFilter plain, negated;
    plain.add({p.regex(), false});
    negated.add({p.regex(), true});
    ASSERT_NE(plain.accepts(c.packet), negated.accepts(c.packet)) << p.regex();
    ASSERT_EQ(plain.accepts(c.packet), p.matches(oracle::hex_of(c.packet)));
  }
}

TEST(Modification, ThreeXorScript) {
  modules::ModificationEngine engine;
  for (auto [pos, val] : {std::pair{7, 0x04}, {10, 0x08}, {12, 0x04 + 0x08}}) {
    modules::PacketModification m;
    m.operation = modules::Op::kXor;
    m.position = pos;
    m.operand = static_cast<std::uint8_t>(val);
    engine.add(m);
  }
  Bytes data = from_hex("aaaa0102030405060708090a0b0c");
  EXPECT_TRUE(engine.apply(data).empty());
  EXPECT_EQ(to_hex(data), "aaaa0102030405020708010a070c");
}

TEST(Modification, SmallExamples) {
  Bytes zero{0x00};
  modules::PacketModification n;
  n.operation = modules::Op::kNot;
  n.position = 0;
  modules::apply_modification(zero, n);
  EXPECT_EQ(zero, Bytes{0xFF});

  Bytes d = from_hex("aabbdd");
  modules::PacketModification ins;
  ins.operation = modules::Op::kInsert;
  ins.position = 2;
  ins.payload = Bytes{0xCC};
  modules::apply_modification(d, ins);
  EXPECT_EQ(to_hex(d), "aabbccdd");

  Bytes s{0x81};
  modules::PacketModification sl;
  sl.operation = modules::Op::kShiftLeft;
  sl.content = 0x81;
  sl.operand = 1;
  modules::apply_modification(s, sl);
  EXPECT_EQ(s, Bytes{0x02});
}

TEST(Modification, XorTwiceIsIdentity) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    Bytes data(1 + rng() % 64);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    modules::PacketModification m;
    m.operation = modules::Op::kXor;
    m.position = rng() % data.size();
    m.operand = static_cast<std::uint8_t>(rng());
    Bytes twice = data;
    modules::apply_modification(twice, m);
    modules::apply_modification(twice, m);
    ASSERT_EQ(twice, data);
  }
}

TEST(Modification, InvalidRulesRejected) {
  modules::PacketModification both;
  both.operation = modules::Op::kXor;
  both.position = 1;
  both.content = 2;
  both.operand = 3;
  EXPECT_THROW(modules::check(both), Error);

  modules::PacketModification neither = both;
  neither.position.reset();
  neither.content.reset();
  EXPECT_THROW(modules::check(neither), Error);

  modules::PacketModification not_with_operand;
  not_with_operand.operation = modules::Op::kNot;
  not_with_operand.position = 0;
  not_with_operand.operand = 1;
  EXPECT_THROW(modules::check(not_with_operand), Error);

  modules::PacketModification insert_without_pos;
  insert_without_pos.operation = modules::Op::kInsert;
  insert_without_pos.payload = Bytes{1};
  EXPECT_THROW(modules::check(insert_without_pos), Error);

  Bench b;
  b.node.register_module(std::make_unique<modules::PacketModModule>());
  auto e = b.reply("packet_mod/add", {{"operation", "XOR"}, {"position", 1}, {"content", 2}, {"operand", 3}});
  EXPECT_EQ(e["code"], "invalid_argument");
  EXPECT_EQ(b.reply("packet_mod/add", {{"operation", "ROTATE"}, {"position", 1}})["code"], "schema");
}

TEST(Modification, OutOfRangeRuleIsSkippedWithWarning) {
  Bench b;
  b.node.register_module(std::make_unique<modules::PacketModModule>());
  b.reply("packet_mod/add", {{"operation", "XOR"}, {"position", 9}, {"operand", 1}});
  b.reply("packet_mod/add", {{"operation", "XOR"}, {"position", 0}, {"operand", 1}});
  b.node.drain_host();
  b.node.dispatch_packet(packet({0x10, 0x20}));
  b.node.run_loop_iteration();
  auto host = b.node.drain_host();
  ASSERT_EQ(host.size(), 2u);
  EXPECT_EQ(host[0].topic, "packet_mod/error");
  EXPECT_EQ(host[0].payload["code"], "out_of_range");
  EXPECT_EQ(pipeline::packet_from_json(host[1].payload).data, (Bytes{0x11, 0x20}));
}

TEST(Modification, RuleListRoundTripsThroughCommands) {
  Bench b;
  b.node.register_module(std::make_unique<modules::PacketModModule>());
  Json rule{{"operation", "APPEND"}, {"payload", "beef"}, {"pattern", "^aa"}};
  EXPECT_EQ(b.reply("packet_mod/add", rule)["result"]["mods"], 1);
  EXPECT_EQ(b.reply("packet_mod/list")["result"]["mods"][0], rule);
  EXPECT_EQ(b.reply("packet_mod/reset")["result"]["mods"], 0);
}

TEST(Modification, MatchesSpliceOracle) {
  std::mt19937_64 rng(2024);
  oracle::PacketPipeline pipe;
  for (int i = 0; i < 2000; ++i) {
    auto c = oracle::random_case(rng);
    ASSERT_EQ(pipe.run(c), oracle::expected_output(c)) << "case " << i << " packet " << oracle::hex_of(c.packet);
  }
}

namespace {

const char* kPlantScenario = R"({
  "seed": 3,
  "actors": [
    {"id": "remote", "kind": "beacon", "carrier_hz": 433920000.0, "bitrate": 3400,
     "power_dbm": -45, "preamble_len": 64, "sync_word": "d391",
     "payload": "aaaa0102030405060708090a0b0c", "start_us": 20000,
     "period_us": 200000, "count": 2},
    {"id": "noise", "kind": "beacon", "carrier_hz": 433920000.0, "bitrate": 3400,
     "power_dbm": -45, "preamble_len": 64, "sync_word": "d391",
     "payload": "55550102030405060708090a0b0c", "start_us": 120000},
    {"id": "plant", "kind": "receiver", "carrier_hz": 434500000.0,
     "bandwidth_hz": 325000.0, "bitrate": 3400, "sync_word": "d391",
     "packet_len": 14, "crc": false,
     "rule": {"kind": "command", "prefix": "aaaa0102030405020708010a070c"}}
  ]
})";

struct PlantRig {
  env::RfEnvironment env;
  Node node;

  PlantRig() : PlantRig(env::parse_scenario(Json::parse(kPlantScenario))) {}
  explicit PlantRig(const env::EnvScenario& s) : env(s.noise_model()), node(env) {
    env::apply_scenario(s, env);
    modules::register_builtins(node, {"radioA", "radioB", "packet_filter", "packet_mod", "repeater"});
    Json modem{{"bitRate", 3400},     {"rxBandwidth", 58e3},       {"syncWord", "d391"},
               {"preambleLen", 64},   {"isFixedPacketLen", true}, {"packetLen", 14},
               {"crcEnabled", false}};
    modem["carrierFreq"] = 433.92e6;
    expect_reply("radioA/set_modem_config", modem);
    modem["carrierFreq"] = 434.5e6;
    expect_reply("radioB/set_modem_config", modem);
    expect_reply("radioA/rx");
  }

  Json expect_reply(const std::string& topic, const Json& args = Json::object()) {
    auto out = node.handle_user_command(topic, args);
    EXPECT_EQ(out.at(0).topic.substr(out.at(0).topic.find('/')), "/reply") << out.at(0).payload.dump();
    return out.at(0).payload;
  }

  std::vector<env::ReceptionEvent> plant_log() const {
    std::vector<env::ReceptionEvent> out;
    for (const auto& ev : env.reception_log()) {
      if (ev.actor == "plant") out.push_back(ev);
    }
    return out;
  }
};

}  // namespace

TEST(Repeater, FilterModifyRepeatChainOperatesTarget) {
  PlantRig rig;
  rig.expect_reply("packet_filter/add", {{"pattern", "^aaaa"}});
  for (auto [pos, val] : {std::pair{7, 0x04}, {10, 0x08}, {12, 0x0C}}) {
    rig.expect_reply("packet_mod/add", {{"operation", "XOR"}, {"position", pos}, {"operand", val}});
  }
  rig.expect_reply("repeater/enable", {{"radio", "radioB"}, {"count", 1}});
  rig.node.run_for(600'000);

  auto log = rig.plant_log();
  ASSERT_EQ(log.size(), 2u);
  for (const auto& ev : log) {
    EXPECT_EQ(ev.source, "radioB");
    EXPECT_TRUE(ev.accepted) << ev.reason;
    EXPECT_EQ(to_hex(ev.data), "aaaa0102030405020708010a070c");
  }
  EXPECT_EQ(rig.node.stats().packets_dropped, 1u);
}

TEST(Repeater, CountControlsEmissions) {
  for (int count : {0, 1, 3}) {
    PlantRig rig;
    rig.expect_reply("packet_filter/add", {{"pattern", "^aaaa"}});
    rig.expect_reply("repeater/enable", {{"radio", "radioB"}, {"count", count}});
    auto before = rig.env.emission_count();
    rig.node.run_for(200'000);
    int repeats = 0;
    for (auto id = before; id < rig.env.emission_count(); ++id) {
      if (rig.env.emission(id).source == "radioB") repeats += rig.env.emission(id).repeat_count;
    }
    EXPECT_EQ(repeats, count);
    auto sent = rig.node.radios().at("radioB").stats().tx_packets;
    EXPECT_EQ(sent, static_cast<std::uint64_t>(count));
    rig.node.run_for(90'000);
    EXPECT_EQ(rig.plant_log().size(), count > 0 ? static_cast<std::size_t>(count) : 0u);
  }
}

TEST(Repeater, HostStillSeesRepeatedPackets) {
  PlantRig rig;
  rig.expect_reply("repeater/enable", {{"radio", "radioB"}});
  rig.node.drain_host();
  rig.node.run_for(100'000);
  int packets = 0;
  for (const auto& m : rig.node.drain_host()) packets += m.topic == "radioA/packet";
  EXPECT_EQ(packets, 1);
}

TEST(Repeater, DisabledOrMisconfiguredRepeatsNothing) {
  PlantRig rig;
  EXPECT_EQ(rig.node.handle_user_command("repeater/enable", {{"radio", "radioZ"}})[0].payload["code"],
            "unknown_radio");
  EXPECT_EQ(rig.node.handle_user_command("repeater/configure", {{"count", -1}})[0].payload["code"],
            "invalid_argument");
  rig.node.run_for(100'000);
  EXPECT_TRUE(rig.plant_log().empty());
}

TEST(RadioManager, StatusConfigAndRegisters) {
  PlantRig rig;
  auto st = rig.expect_reply("radioA/status")["result"];
  EXPECT_EQ(st["chip"], "VC1101");
  EXPECT_EQ(st["mode"], "RX");
  EXPECT_EQ(st["config"]["carrierFreq"], 433.92e6);

  auto cfg = rig.expect_reply("radioB/get_modem_config")["result"];
  EXPECT_EQ(cfg["packetLen"], 14);
  EXPECT_EQ(cfg["crcEnabled"], false);

  auto reg = rig.expect_reply("radioA/set_register", {{"address", 0x20}, {"value", 0x5A}})["result"];
  EXPECT_EQ(reg["value"], 0x5A);
  EXPECT_EQ(rig.expect_reply("radioA/get_register", {{"address", 0x20}})["result"]["value"], 0x5A);

  auto bad = rig.node.handle_user_command("radioA/set_register", {{"address", 300}, {"value", 1}});
  EXPECT_EQ(bad[0].payload["code"], "out_of_range");
  auto far = rig.node.handle_user_command("radioA/set_modem_config", {{"carrierFreq", 2.4e9}});
  EXPECT_EQ(far[0].topic, "radioA/error");
  EXPECT_EQ(far[0].payload["code"], "out_of_range");

  EXPECT_EQ(rig.expect_reply("radioB/set_mode", {{"mode", "JAM"}})["result"]["mode"], "JAM");
  EXPECT_EQ(rig.expect_reply("radioB/idle")["result"]["mode"], "IDLE");
  auto rssi = rig.expect_reply("radioB/read_rssi")["result"]["rssi"].get<double>();
  EXPECT_GE(rssi, -103.0);
}
