#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "manet/topology/links.hpp"
#include "manet/types.hpp"

namespace manet::routing {

/// Weights of the queue/energy route metric.
struct CostWeights {
  double alpha = 1.0;   // queueing term
  double beta = 1.0;    // energy term
  double w_ref = 0.5;   // s; waiting time that saturates the queueing term
};

struct NodeCost {
  double w_est = 0.0;            // s
  double energy_fraction = 1.0;  // residual / initial
  double scalar = 0.0;
};

/// alpha * min(w_est / w_ref, 1) + beta * (1 - energy_fraction).
/// Throws std::invalid_argument for negative weights, alpha + beta == 0,
/// or w_ref <= 0.
NodeCost node_cost(double w_est, double energy_fraction, const CostWeights& weights);

/// Cost of one node, looked up by id.
using CostLookup = std::function<double(NodeId)>;

/// Sum of node costs over the intermediate hops (endpoints excluded).
double route_cost(const SourceRoute& route, const CostLookup& cost);

/// Index of the argmin-cost route. Costs within 1e-9 relative are ties,
/// broken by fewer hops, then the lexicographically smallest node-id
/// sequence. `candidates` must be non-empty.
std::size_t select_route(std::span<const SourceRoute> candidates, const CostLookup& cost);

struct AdmissionThresholds {
  double queue = 0.8;   // theta_q: suppress above this occupancy fraction
  double energy = 0.1;  // theta_e: suppress below this energy fraction
};

enum class Admission : std::uint8_t { Forward, Suppress };

/// Destinations always answer; other nodes suppress while congested or
/// depleted.
Admission admit_rreq(bool is_destination, double occupancy_fraction, double energy_fraction,
                     const AdmissionThresholds& thresholds);

enum class Role : std::uint8_t { Head, Member, Gateway };

std::string_view to_string(Role role);

struct ClusterRole {
  Role role = Role::Member;
  NodeId head = kNoNode;              // own id for heads
  std::vector<NodeId> adjacent_heads;  // heads of other clusters a gateway bridges to
};

/// Greedy election over the alive nodes of `links`:
///  1. the uncovered node with the most residual energy (ties: lower id)
///     becomes Head; its uncovered neighbors become its Members;
///  2. a Member hearing two or more Heads becomes Gateway;
///  3. two clusters that touch only member-to-member promote the endpoints
///     of their smallest (min id, max id) boundary link to Gateway.
/// Dead nodes (alive[i] == 0) get head = kNoNode.
std::vector<ClusterRole> elect_clusters(const topology::LinkSet& links,
                                        std::span<const double> energies,
                                        std::span<const std::uint8_t> alive = {});

/// Human-readable violations of the role invariants; empty when all hold.
std::vector<std::string> check_cluster_roles(const std::vector<ClusterRole>& roles,
                                             const topology::LinkSet& links,
                                             std::span<const std::uint8_t> alive = {});

inline bool on_backbone(const ClusterRole& role) noexcept { return role.role != Role::Member; }

enum class DiscoveryScope : std::uint8_t { Backbone, Flat };

/// Backbone when source and destination are joined by a path whose
/// intermediate hops are all Heads or Gateways, entered through the
/// source's own Head when the source is a Member; Flat (the fallback) when
/// only a path through Members connects them. A destination unreachable
/// over any path gets Backbone.
DiscoveryScope clustered_discovery(NodeId source, NodeId destination,
                                   const std::vector<ClusterRole>& roles,
                                   const topology::LinkSet& links);

/// Shortest such backbone path, empty if none.
SourceRoute backbone_path(NodeId source, NodeId destination,
                          const std::vector<ClusterRole>& roles,
                          const topology::LinkSet& links);

}  // namespace manet::routing
