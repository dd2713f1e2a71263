#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "manet/energy/energy.hpp"
#include "manet/experiment/config.hpp"
#include "manet/metrics/metrics.hpp"
#include "manet/routing/nfpqr.hpp"
#include "manet/topology/links.hpp"

namespace manet::experiment {

enum class Behavior : std::uint8_t { Cooperative, Selfish, Faulty };

/// Everything a run draws before the first event. It depends on the seed
/// and the scenario but never on the protocol, so runs that differ only in
/// protocol start from the same placement, traffic and misbehaving nodes.
struct World {
  std::vector<topology::Position> positions;
  std::vector<Behavior> behavior;
  std::vector<Flow> flows;
  topology::LinkSet initial_links;
};

/// Throws InvalidValue when explicit flows name unknown nodes and
/// NotConnected when `require_connected` cannot be met.
World build_world(const ScenarioConfig& config);

/// Per-run protocol counters beyond what the trace carries.
struct NetworkStats {
  std::uint64_t discoveries = 0;
  std::uint64_t backbone_discoveries = 0;
  std::uint64_t backbone_fallbacks = 0;
  std::uint64_t rreq_transmissions = 0;
  std::uint64_t max_rreq_per_discovery = 0;         // over all (source, request-id)
  std::uint64_t max_forwards_per_node_request = 0;  // one node, one (source, request-id)
  std::uint64_t suppressed_rreqs = 0;
  std::uint64_t hop_failures = 0;
  std::uint64_t rerr_generated = 0;  // link-broken notifications, incl. those raised at the source
  std::uint64_t cerr_generated = 0;
  std::uint64_t selfish_discards = 0;
  std::uint64_t elections = 0;
  std::uint64_t sleep_plans = 0;
  /// Routes delivered to a discovering source by RREPs, in arrival order.
  std::vector<SourceRoute> discovered_routes;
};

using TraceSink = std::function<void(const metrics::TraceRecord&)>;
using RoleSink = std::function<void(Time, NodeId, routing::Role, NodeId)>;

/// One packet-level simulation run.
class Network {
 public:
  Network(const ScenarioConfig& config, World world, TraceSink trace, RoleSink roles = {});
  ~Network();
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  /// Runs to config.sim_time. Call once.
  void run();

  const World& world() const noexcept;
  const NetworkStats& stats() const noexcept;
  std::vector<energy::NodeEnergy> energies() const;
  const topology::LinkSet& links() const noexcept;
  const std::vector<routing::ClusterRole>& roles() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace manet::experiment
