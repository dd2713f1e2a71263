#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "manet/energy/energy.hpp"
#include "manet/queueing/service_queue.hpp"
#include "manet/routing/dsr.hpp"
#include "manet/routing/nfpqr.hpp"
#include "manet/topology/geometry.hpp"
#include "manet/topology/mobility.hpp"

namespace manet::experiment {

enum class Protocol : std::uint8_t { Dsr, Nfpqr, NfpqrClustered };

std::string_view to_string(Protocol protocol);
std::optional<Protocol> protocol_from(std::string_view text);

struct Flow {
  NodeId source = 0;
  NodeId destination = 0;
  double rate = 0.0;  // packets/s
  std::uint64_t bits = routing::kDataBits;

  friend bool operator==(const Flow&, const Flow&) = default;
};

struct TrafficConfig {
  std::uint32_t pairs = 10;       // random pairs when no explicit flows
  double load = 0.7;              // offered load at the busiest node, as a fraction of mu
  std::optional<double> rate;     // per-flow rate; overrides `load`
  std::uint64_t packet_bits = routing::kDataBits;
  Time start = 1.0;
  std::optional<Time> stop;       // default: end of run
  std::vector<Flow> flows;        // explicit flows replace the random pairs

  friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

struct QueueConfig {
  std::uint32_t servers = 1;
  std::size_t capacity = 10;      // K; NFPQR variants only
  double service_rate = 10.0;     // mu, packets/s
  queueing::Discipline discipline = queueing::Discipline::FIFO;
  std::size_t window = 50;        // completions behind w_est

  friend bool operator==(const QueueConfig&, const QueueConfig&) = default;
};

struct NfpqrConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double theta_q = 0.8;
  double theta_e = 0.1;
  std::optional<double> w_ref;    // default 10 / mu
  std::uint32_t replies = 3;      // RREPs per discovery at the destination
  Time reelection = 5.0;

  friend bool operator==(const NfpqrConfig&, const NfpqrConfig&) = default;
};

struct BehaviorConfig {
  double selfish_fraction = 0.0;
  double faulty_fraction = 0.0;
  double drop_probability = 1.0;

  friend bool operator==(const BehaviorConfig&, const BehaviorConfig&) = default;
};

struct LinkTiming {
  Time processing = 0.5e-3;       // per-hop handling delay added to airtime

  friend bool operator==(const LinkTiming&, const LinkTiming&) = default;
};

struct ScenarioConfig {
  std::uint32_t nodes = 30;
  topology::Area area;
  double range = 250.0;
  Time sim_time = 300.0;
  std::uint32_t periods = 5;
  Protocol protocol = Protocol::Dsr;
  std::uint64_t seed = 1;

  std::optional<std::string> placement_file;
  bool require_connected = true;  // redraw random placements until connected

  TrafficConfig traffic;
  topology::MobilityParams mobility;
  Time mobility_tick = 0.1;
  QueueConfig queue;
  NfpqrConfig nfpqr;
  routing::DsrParams dsr;
  energy::EnergyModel energy;
  BehaviorConfig behavior;
  LinkTiming link;
  bool power_management = false;
  Time power_interval = 5.0;

  /// Non-fatal notes gathered while loading, e.g. keys the protocol ignores.
  std::vector<std::string> warnings;

  double w_ref() const { return nfpqr.w_ref.value_or(10.0 / queue.service_rate); }
  bool is_nfpqr() const noexcept { return protocol != Protocol::Dsr; }
};

/// Throws InvalidValue naming the first inconsistent field.
void validate(const ScenarioConfig& config);

/// Strict `key: value` parser. Unknown keys raise UnknownKey, malformed
/// lines ParseError (with the line number), bad values InvalidValue.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);

/// Applies one `key: value` setting. Used by the parser and by callers
/// that build scenarios in code.
void apply_setting(ScenarioConfig& config, const std::string& key, const std::string& value);

/// Names of the fields other than `protocol` (and `seed`, when
/// `ignore_seed`) on which the two configs differ.
std::vector<std::string> differing_fields(const ScenarioConfig& a, const ScenarioConfig& b,
                                          bool ignore_seed = false);

}  // namespace manet::experiment
