#include "rfq/env/scenario.hpp"

#include <fstream>
#include <random>
#include <set>

#include "rfq/crc.hpp"

namespace rfq::env {

using nlohmann::json;

Bytes Keyfob::next_data() const {
  Bytes data = spec_.payload;
  write_code(data, spec_.code_offset, spec_.next_code);
  return data;
}

EmissionId Keyfob::press(RfEnvironment& env, Micros at) {
  Bytes data = next_data();
  if (spec_.crc) append_crc16(data);
  Emission e;
  e.source = spec_.id;
  e.carrier = spec_.carrier;
  e.bitrate = spec_.bitrate;
  e.power = spec_.power;
  e.preamble_len = spec_.preamble_len;
  e.sync_word = spec_.sync_word;
  e.payload = std::move(data);
  e.start_time = at;
  ++spec_.next_code;
  return env.add_emission(std::move(e));
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

Bytes hex_or(const json& j, const char* key, Bytes fallback = {}) {
  auto it = j.find(key);
  return it == j.end() ? fallback : from_hex(it->get<std::string>());
}

std::string require_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("missing field: ") + key);
  }
  return it->get<std::string>();
}

Emission parse_emission(const json& j) {
  Emission e;
  e.carrier = get_or<double>(j, "carrier_hz", e.carrier);
  e.bitrate = get_or<double>(j, "bitrate", e.bitrate);
  e.power = get_or<double>(j, "power_dbm", e.power);
  e.preamble_len = get_or<int>(j, "preamble_len", e.preamble_len);
  e.sync_word = hex_or(j, "sync_word");
  e.payload = hex_or(j, "payload");
  e.start_time = get_or<Micros>(j, "start_us", 0);
  e.repeat_count = get_or<int>(j, "repeat_count", 1);
  e.inter_repeat_gap = get_or<Micros>(j, "inter_repeat_gap_us", 0);
  return e;
}

ActorSpec parse_actor(const json& j) {
  auto id = require_string(j, "id");
  auto kind = require_string(j, "kind");
  if (kind == "keyfob") {
    KeyfobSpec s;
    s.id = id;
    s.carrier = get_or<double>(j, "carrier_hz", s.carrier);
    s.bitrate = get_or<double>(j, "bitrate", s.bitrate);
    s.power = get_or<double>(j, "power_dbm", s.power);
    s.preamble_len = get_or<int>(j, "preamble_len", s.preamble_len);
    s.sync_word = hex_or(j, "sync_word", s.sync_word);
    s.payload = hex_or(j, "payload");
    s.crc = get_or<bool>(j, "crc", s.crc);
    s.code_offset = get_or<std::size_t>(j, "code_offset", s.code_offset);
    s.next_code = get_or<std::uint32_t>(j, "initial_code", s.next_code);
    s.presses = get_or<std::vector<Micros>>(j, "presses_us", {});
    if (s.payload.size() < s.code_offset + 4) s.payload.resize(s.code_offset + 4, 0);
    return s;
  }
  if (kind == "car_receiver" || kind == "receiver") {
    ReceiverActor r;
    r.id = id;
    r.carrier = get_or<double>(j, "carrier_hz", r.carrier);
    r.bandwidth = get_or<double>(j, "bandwidth_hz", r.bandwidth);
    r.bitrate = get_or<double>(j, "bitrate", r.bitrate);
    r.bitrate_tolerance = get_or<double>(j, "bitrate_tolerance", r.bitrate_tolerance);
    r.sync_word = hex_or(j, "sync_word");
    r.packet_len = get_or<std::size_t>(j, "packet_len", 0);
    r.crc = get_or<bool>(j, "crc", r.crc);
    const json& rule = j.at("rule");
    auto rule_kind = require_string(rule, "kind");
    if (rule_kind == "rolling_code") {
      RollingCodeRule rc;
      rc.code_offset = get_or<std::size_t>(rule, "code_offset", rc.code_offset);
      rc.window = get_or<std::uint32_t>(rule, "window", rc.window);
      rc.last = get_or<std::uint32_t>(rule, "last_code", rc.last);
      r.rule = rc;
    } else if (rule_kind == "command") {
      r.rule = CommandRule{hex_or(rule, "prefix")};
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown rule kind: " + rule_kind);
    }
    return r;
  }
  if (kind == "mouse") {
    MouseSpec m;
    m.id = id;
    m.carrier = get_or<double>(j, "carrier_hz", m.carrier);
    m.bitrate = get_or<double>(j, "bitrate", m.bitrate);
    m.power = get_or<double>(j, "power_dbm", m.power);
    m.address = hex_or(j, "address");
    m.payload_len = get_or<std::size_t>(j, "payload_len", m.payload_len);
    m.start = get_or<Micros>(j, "start_us", m.start);
    m.period = get_or<Micros>(j, "period_us", m.period);
    m.count = get_or<int>(j, "count", m.count);
    return m;
  }
  if (kind == "beacon") {
    BeaconSpec b;
    b.id = id;
    b.base = parse_emission(j);
    b.period = get_or<Micros>(j, "period_us", 0);
    b.count = get_or<int>(j, "count", 1);
    b.random_payload = get_or<bool>(j, "random_payload", false);
    return b;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown actor kind: " + kind);
}

const std::string& actor_id(const ActorSpec& a) {
  return std::visit([](const auto& s) -> const std::string& { return s.id; }, a);
}

std::uint32_t fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

Bytes random_bytes(std::uint64_t seed, const std::string& id, int index, std::size_t n) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), fnv1a(id),
                    static_cast<std::uint32_t>(index)};
  std::mt19937 gen(seq);
  std::uniform_int_distribution<int> dist(0, 255);
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(dist(gen));
  return out;
}

}  // namespace

EnvScenario parse_scenario(const json& doc) {
  EnvScenario s;
  s.seed = get_or<std::uint64_t>(doc, "seed", s.seed);
  s.noise_floor_dbm = get_or<double>(doc, "noise_floor_dbm", s.noise_floor_dbm);
  s.rssi_noise_sigma_db = get_or<double>(doc, "rssi_noise_sigma_db", s.rssi_noise_sigma_db);
  s.squelch_margin_db = get_or<double>(doc, "squelch_margin_db", s.squelch_margin_db);
  std::set<std::string> ids;
  if (auto it = doc.find("actors"); it != doc.end()) {
    for (const auto& a : *it) {
      auto spec = parse_actor(a);
      if (!ids.insert(actor_id(spec)).second) {
        throw Error(ErrorCode::kDuplicate, "duplicate actor id: " + actor_id(spec));
      }
      s.actors.push_back(std::move(spec));
    }
  }
  return s;
}

EnvScenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kInvalidArgument, "cannot open scenario: " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("scenario parse error: ") + e.what());
  }
  return parse_scenario(doc);
}

ScenarioActors apply_scenario(const EnvScenario& scenario, RfEnvironment& env) {
  ScenarioActors actors;
  for (const auto& spec : scenario.actors) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, KeyfobSpec>) {
            Keyfob fob(s);
            for (auto at : s.presses) fob.press(env, at);
            actors.keyfobs.emplace(s.id, std::move(fob));
          } else if constexpr (std::is_same_v<T, ReceiverActor>) {
            env.add_receiver(s);
          } else if constexpr (std::is_same_v<T, MouseSpec>) {
            for (int i = 0; i < s.count; ++i) {
              Emission e;
              e.source = s.id;
              e.carrier = s.carrier;
              e.bitrate = s.bitrate;
              e.power = s.power;
              e.preamble_len = 8;
              e.sync_word = s.address;
              e.payload = random_bytes(scenario.seed, s.id, i, s.payload_len);
              append_crc16(e.payload);
              e.start_time = s.start + i * s.period;
              env.add_emission(std::move(e));
            }
          } else {
            for (int i = 0; i < s.count; ++i) {
              Emission e = s.base;
              e.source = s.id;
              e.start_time = s.base.start_time + i * s.period;
              if (s.random_payload) {
                e.payload = random_bytes(scenario.seed, s.id, i, s.base.payload.size());
              }
              env.add_emission(std::move(e));
            }
          }
        },
        spec);
  }
  return actors;
}

}  // namespace rfq::env
