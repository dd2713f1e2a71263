#include "manet/experiment/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "manet/error.hpp"
#include "manet/metrics/trace.hpp"
#include "manet/queueing/kendall.hpp"

namespace manet::experiment {

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::Dsr: return "dsr";
    case Protocol::Nfpqr: return "nfpqr";
    case Protocol::NfpqrClustered: return "nfpqr-clustered";
  }
  return "?";
}

std::optional<Protocol> protocol_from(std::string_view text) {
  if (text == "dsr") return Protocol::Dsr;
  if (text == "nfpqr") return Protocol::Nfpqr;
  if (text == "nfpqr-clustered") return Protocol::NfpqrClustered;
  return std::nullopt;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void invalid(const std::string& key, const std::string& value, const std::string& why) {
  throw InvalidValue(key, "invalid value '" + value + "' for " + key + ": " + why);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!metrics::parse_double(value, v) || !std::isfinite(v)) invalid(key, value, "expected a number");
  return v;
}

double positive(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (!(v > 0.0)) invalid(key, value, "must be positive");
  return v;
}

double non_negative(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0.0) invalid(key, value, "must not be negative");
  return v;
}

double fraction(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0.0 || v > 1.0) invalid(key, value, "must lie in [0, 1]");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (value.empty() || ec != std::errc{} || ptr != end) invalid(key, value, "expected a non-negative integer");
  return v;
}

std::uint32_t to_u32(const std::string& key, const std::string& value) {
  const auto v = to_u64(key, value);
  if (v > UINT32_MAX) invalid(key, value, "too large");
  return static_cast<std::uint32_t>(v);
}

std::uint32_t positive_u32(const std::string& key, const std::string& value) {
  const auto v = to_u32(key, value);
  if (v == 0) invalid(key, value, "must be at least 1");
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "no" || value == "off") return false;
  invalid(key, value, "expected true or false");
}

queueing::Discipline to_discipline(const std::string& key, const std::string& value) {
  if (value == "fifo" || value == "FCFS" || value == "fcfs") return queueing::Discipline::FIFO;
  if (value == "lifo" || value == "LCFS" || value == "lcfs") return queueing::Discipline::LIFO;
  if (value == "priority" || value == "PRI" || value == "pri") return queueing::Discipline::Priority;
  invalid(key, value, "expected fifo, lifo or priority");
}

Flow to_flow(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  std::vector<std::string> parts;
  for (std::string p; in >> p;) parts.push_back(p);
  if (parts.size() != 3 && parts.size() != 4) invalid(key, value, "expected 'source destination rate [bits]'");
  Flow f;
  f.source = to_u32(key, parts[0]);
  f.destination = to_u32(key, parts[1]);
  f.rate = positive(key, parts[2]);
  if (parts.size() == 4) {
    f.bits = to_u64(key, parts[3]);
    if (f.bits == 0) invalid(key, value, "packet size must be positive");
  }
  if (f.source == f.destination) invalid(key, value, "source and destination must differ");
  return f;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

enum class Scope : std::uint8_t { Any, Nfpqr, Clustered };

struct KeySpec {
  Scope scope;
  Setter set;
};

const std::map<std::string, KeySpec, std::less<>>& key_table() {
  static const std::map<std::string, KeySpec, std::less<>> table = [] {
    std::map<std::string, KeySpec, std::less<>> t;
    auto any = [&](const char* key, Setter s) { t.emplace(key, KeySpec{Scope::Any, std::move(s)}); };
    auto nf = [&](const char* key, Setter s) { t.emplace(key, KeySpec{Scope::Nfpqr, std::move(s)}); };

    any("nodes", [](auto& c, auto& k, auto& v) { c.nodes = positive_u32(k, v); });
    any("area.width", [](auto& c, auto& k, auto& v) { c.area.width = positive(k, v); });
    any("area.height", [](auto& c, auto& k, auto& v) { c.area.height = positive(k, v); });
    any("range", [](auto& c, auto& k, auto& v) { c.range = positive(k, v); });
    any("sim_time", [](auto& c, auto& k, auto& v) { c.sim_time = positive(k, v); });
    any("periods", [](auto& c, auto& k, auto& v) { c.periods = positive_u32(k, v); });
    any("protocol", [](auto& c, auto& k, auto& v) {
      auto p = protocol_from(v);
      if (!p) invalid(k, v, "expected dsr, nfpqr or nfpqr-clustered");
      c.protocol = *p;
    });
    any("seed", [](auto& c, auto& k, auto& v) { c.seed = to_u64(k, v); });
    any("placement.file", [](auto& c, auto&, auto& v) { c.placement_file = v; });
    any("placement.require_connected", [](auto& c, auto& k, auto& v) { c.require_connected = to_bool(k, v); });

    any("traffic.pairs", [](auto& c, auto& k, auto& v) { c.traffic.pairs = to_u32(k, v); });
    any("traffic.load", [](auto& c, auto& k, auto& v) { c.traffic.load = positive(k, v); });
    any("traffic.rate", [](auto& c, auto& k, auto& v) { c.traffic.rate = positive(k, v); });
    any("traffic.packet_bits", [](auto& c, auto& k, auto& v) {
      c.traffic.packet_bits = to_u64(k, v);
      if (c.traffic.packet_bits == 0) invalid(k, v, "must be positive");
    });
    any("traffic.start", [](auto& c, auto& k, auto& v) { c.traffic.start = non_negative(k, v); });
    any("traffic.stop", [](auto& c, auto& k, auto& v) { c.traffic.stop = positive(k, v); });
    any("traffic.flow", [](auto& c, auto& k, auto& v) { c.traffic.flows.push_back(to_flow(k, v)); });

    any("mobility.speed_min", [](auto& c, auto& k, auto& v) { c.mobility.speed_min = non_negative(k, v); });
    any("mobility.speed_max", [](auto& c, auto& k, auto& v) { c.mobility.speed_max = non_negative(k, v); });
    any("mobility.pause", [](auto& c, auto& k, auto& v) { c.mobility.pause = non_negative(k, v); });
    any("mobility.tick", [](auto& c, auto& k, auto& v) { c.mobility_tick = positive(k, v); });

    any("queue.model", [](auto& c, auto& k, auto& v) {
      queueing::KendallSpec spec;
      try {
        spec = queueing::parse_kendall(v);
      } catch (const ParseError& e) {
        invalid(k, v, e.what());
      }
      if (spec.arrival != queueing::DistributionCode::M || spec.service != queueing::DistributionCode::M) {
        invalid(k, v, "only exponential (M) arrivals and service are simulated");
      }
      c.queue.servers = spec.servers;
      if (spec.capacity) c.queue.capacity = static_cast<std::size_t>(*spec.capacity);
      switch (spec.ranking) {
        case queueing::Ranking::FCFS: c.queue.discipline = queueing::Discipline::FIFO; break;
        case queueing::Ranking::LCFS: c.queue.discipline = queueing::Discipline::LIFO; break;
        case queueing::Ranking::PRI: c.queue.discipline = queueing::Discipline::Priority; break;
      }
    });
    any("queue.servers", [](auto& c, auto& k, auto& v) { c.queue.servers = positive_u32(k, v); });
    nf("queue.capacity", [](auto& c, auto& k, auto& v) { c.queue.capacity = positive_u32(k, v); });
    any("queue.service_rate", [](auto& c, auto& k, auto& v) { c.queue.service_rate = positive(k, v); });
    any("queue.discipline", [](auto& c, auto& k, auto& v) { c.queue.discipline = to_discipline(k, v); });
    nf("queue.window", [](auto& c, auto& k, auto& v) { c.queue.window = positive_u32(k, v); });

    nf("nfpqr.alpha", [](auto& c, auto& k, auto& v) { c.nfpqr.alpha = non_negative(k, v); });
    nf("nfpqr.beta", [](auto& c, auto& k, auto& v) { c.nfpqr.beta = non_negative(k, v); });
    nf("nfpqr.theta_q", [](auto& c, auto& k, auto& v) { c.nfpqr.theta_q = fraction(k, v); });
    nf("nfpqr.theta_e", [](auto& c, auto& k, auto& v) { c.nfpqr.theta_e = fraction(k, v); });
    nf("nfpqr.w_ref", [](auto& c, auto& k, auto& v) { c.nfpqr.w_ref = positive(k, v); });
    nf("nfpqr.replies", [](auto& c, auto& k, auto& v) { c.nfpqr.replies = positive_u32(k, v); });
    t.emplace("nfpqr.reelection", KeySpec{Scope::Clustered, [](auto& c, auto& k, auto& v) {
                                            c.nfpqr.reelection = positive(k, v);
                                          }});

    any("dsr.max_ttl", [](auto& c, auto& k, auto& v) { c.dsr.max_ttl = positive_u32(k, v); });
    any("dsr.cache_reply", [](auto& c, auto& k, auto& v) { c.dsr.cache_reply = to_bool(k, v); });
    any("dsr.promiscuous", [](auto& c, auto& k, auto& v) { c.dsr.promiscuous = to_bool(k, v); });
    any("dsr.cache_size", [](auto& c, auto& k, auto& v) { c.dsr.cache_per_destination = positive_u32(k, v); });
    any("dsr.seen_expiry", [](auto& c, auto& k, auto& v) { c.dsr.seen_expiry = positive(k, v); });
    any("dsr.retransmit_limit", [](auto& c, auto& k, auto& v) { c.dsr.retransmit_limit = to_u32(k, v); });
    any("dsr.send_buffer", [](auto& c, auto& k, auto& v) { c.dsr.send_buffer = positive_u32(k, v); });
    any("dsr.send_buffer_timeout", [](auto& c, auto& k, auto& v) { c.dsr.send_buffer_timeout = positive(k, v); });
    any("dsr.discovery_timeout", [](auto& c, auto& k, auto& v) { c.dsr.discovery_timeout = positive(k, v); });
    any("dsr.max_discovery_timeout", [](auto& c, auto& k, auto& v) { c.dsr.max_discovery_timeout = positive(k, v); });

    any("energy.p_tx", [](auto& c, auto& k, auto& v) { c.energy.p_tx = non_negative(k, v); });
    any("energy.p_rx", [](auto& c, auto& k, auto& v) { c.energy.p_rx = non_negative(k, v); });
    any("energy.p_idle", [](auto& c, auto& k, auto& v) { c.energy.p_idle = non_negative(k, v); });
    any("energy.p_sleep", [](auto& c, auto& k, auto& v) { c.energy.p_sleep = non_negative(k, v); });
    any("energy.initial", [](auto& c, auto& k, auto& v) { c.energy.initial = positive(k, v); });
    any("energy.bitrate", [](auto& c, auto& k, auto& v) { c.energy.bit_time = 1.0 / positive(k, v); });

    any("behavior.selfish_fraction", [](auto& c, auto& k, auto& v) { c.behavior.selfish_fraction = fraction(k, v); });
    any("behavior.faulty_fraction", [](auto& c, auto& k, auto& v) { c.behavior.faulty_fraction = fraction(k, v); });
    any("behavior.drop_probability", [](auto& c, auto& k, auto& v) { c.behavior.drop_probability = fraction(k, v); });

    any("link.processing", [](auto& c, auto& k, auto& v) { c.link.processing = non_negative(k, v); });
    any("power.management", [](auto& c, auto& k, auto& v) { c.power_management = to_bool(k, v); });
    any("power.interval", [](auto& c, auto& k, auto& v) { c.power_interval = positive(k, v); });
    return t;
  }();
  return table;
}

}  // namespace

void apply_setting(ScenarioConfig& config, const std::string& key, const std::string& value) {
  const auto& table = key_table();
  auto it = table.find(key);
  if (it == table.end()) throw UnknownKey(key, "unknown config key '" + key + "'");
  it->second.set(config, key, value);
}

void validate(const ScenarioConfig& c) {
  auto fail = [](const char* key, const std::string& why) { throw InvalidValue(key, std::string(key) + ": " + why); };
  if (c.nodes == 0) fail("nodes", "must be at least 1");
  if (c.mobility.speed_min > c.mobility.speed_max) fail("mobility.speed_min", "exceeds mobility.speed_max");
  if (c.traffic.stop && *c.traffic.stop <= c.traffic.start) fail("traffic.stop", "must be after traffic.start");
  for (const auto& f : c.traffic.flows) {
    if (f.source >= c.nodes || f.destination >= c.nodes) fail("traffic.flow", "node id out of range");
  }
  if (c.traffic.flows.empty() && c.traffic.pairs > 0 && c.nodes < 2) fail("traffic.pairs", "needs at least 2 nodes");
  if (c.behavior.selfish_fraction + c.behavior.faulty_fraction > 1.0) {
    fail("behavior.faulty_fraction", "selfish and faulty fractions exceed 1");
  }
  if (c.nfpqr.alpha + c.nfpqr.beta <= 0.0) fail("nfpqr.beta", "alpha + beta must be positive");
  if (auto errors = c.energy.validate(); !errors.empty()) fail("energy", errors.front());
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig config;
  std::set<Scope> scoped;
  std::vector<std::string> scoped_keys;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const std::string content = trim(view);
    if (content.empty()) continue;
    const auto colon = content.find(':');
    if (colon == std::string::npos) {
      throw ParseError(number, "config line " + std::to_string(number) + ": expected 'key: value'");
    }
    const std::string key = trim(std::string_view(content).substr(0, colon));
    const std::string value = trim(std::string_view(content).substr(colon + 1));
    if (key.empty()) throw ParseError(number, "config line " + std::to_string(number) + ": missing key");
    if (value.empty()) {
      throw ParseError(number, "config line " + std::to_string(number) + ": missing value for " + key);
    }
    const auto& table = key_table();
    auto it = table.find(key);
    if (it == table.end()) {
      throw UnknownKey(key, "config line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
    it->second.set(config, key, value);
    if (it->second.scope != Scope::Any) scoped_keys.push_back(key);
  }
  for (const auto& key : scoped_keys) {
    const Scope scope = key_table().find(key)->second.scope;
    const bool used = scope == Scope::Nfpqr ? config.is_nfpqr() : config.protocol == Protocol::NfpqrClustered;
    if (!used) {
      config.warnings.push_back(key + " is ignored by protocol " + std::string(to_string(config.protocol)));
    }
  }
  for (auto& w : config.energy.warnings()) config.warnings.push_back(std::move(w));
  validate(config);
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  return parse_config(in);
}

std::vector<std::string> differing_fields(const ScenarioConfig& a, const ScenarioConfig& b, bool ignore_seed) {
  std::vector<std::string> out;
  auto check = [&](const char* name, bool same) {
    if (!same) out.emplace_back(name);
  };
  check("nodes", a.nodes == b.nodes);
  check("area.width", a.area.width == b.area.width);
  check("area.height", a.area.height == b.area.height);
  check("range", a.range == b.range);
  check("sim_time", a.sim_time == b.sim_time);
  check("periods", a.periods == b.periods);
  if (!ignore_seed) check("seed", a.seed == b.seed);
  check("placement.file", a.placement_file == b.placement_file);
  check("placement.require_connected", a.require_connected == b.require_connected);
  check("traffic", a.traffic == b.traffic);
  check("mobility.speed_min", a.mobility.speed_min == b.mobility.speed_min);
  check("mobility.speed_max", a.mobility.speed_max == b.mobility.speed_max);
  check("mobility.pause", a.mobility.pause == b.mobility.pause);
  check("mobility.tick", a.mobility_tick == b.mobility_tick);
  check("queue", a.queue == b.queue);
  check("nfpqr", a.nfpqr == b.nfpqr);
  check("dsr.max_ttl", a.dsr.max_ttl == b.dsr.max_ttl);
  check("dsr.cache_reply", a.dsr.cache_reply == b.dsr.cache_reply);
  check("dsr.promiscuous", a.dsr.promiscuous == b.dsr.promiscuous);
  check("dsr.cache_size", a.dsr.cache_per_destination == b.dsr.cache_per_destination);
  check("dsr.seen_expiry", a.dsr.seen_expiry == b.dsr.seen_expiry);
  check("dsr.retransmit_limit", a.dsr.retransmit_limit == b.dsr.retransmit_limit);
  check("dsr.send_buffer", a.dsr.send_buffer == b.dsr.send_buffer);
  check("dsr.send_buffer_timeout", a.dsr.send_buffer_timeout == b.dsr.send_buffer_timeout);
  check("dsr.discovery_timeout", a.dsr.discovery_timeout == b.dsr.discovery_timeout);
  check("dsr.max_discovery_timeout", a.dsr.max_discovery_timeout == b.dsr.max_discovery_timeout);
  check("energy.p_tx", a.energy.p_tx == b.energy.p_tx);
  check("energy.p_rx", a.energy.p_rx == b.energy.p_rx);
  check("energy.p_idle", a.energy.p_idle == b.energy.p_idle);
  check("energy.p_sleep", a.energy.p_sleep == b.energy.p_sleep);
  check("energy.initial", a.energy.initial == b.energy.initial);
  check("energy.bitrate", a.energy.bit_time == b.energy.bit_time);
  check("behavior", a.behavior == b.behavior);
  check("link.processing", a.link == b.link);
  check("power.management", a.power_management == b.power_management);
  check("power.interval", a.power_interval == b.power_interval);
  return out;
}

}  // namespace manet::experiment
