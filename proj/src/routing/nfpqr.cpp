#include "manet/routing/nfpqr.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace manet::routing {

NodeCost node_cost(double w_est, double energy_fraction, const CostWeights& weights) {
  if (weights.alpha < 0.0 || weights.beta < 0.0 || !(weights.alpha + weights.beta > 0.0)) {
    throw std::invalid_argument("cost weights must be non-negative with a positive sum");
  }
  if (!(weights.w_ref > 0.0)) throw std::invalid_argument("w_ref must be positive");
  NodeCost c;
  c.w_est = std::max(0.0, w_est);
  c.energy_fraction = std::clamp(energy_fraction, 0.0, 1.0);
  c.scalar = weights.alpha * std::min(c.w_est / weights.w_ref, 1.0) +
             weights.beta * (1.0 - c.energy_fraction);
  return c;
}

double route_cost(const SourceRoute& route, const CostLookup& cost) {
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < route.size(); ++i) total += cost(route[i]);
  return total;
}

std::size_t select_route(std::span<const SourceRoute> candidates, const CostLookup& cost) {
  if (candidates.empty()) throw std::invalid_argument("select_route needs candidates");
  std::vector<double> costs(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) costs[i] = route_cost(candidates[i], cost);

  auto tied = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({std::abs(a), std::abs(b), 1e-300});
  };
  // The minimum first, then the tie-break among everything tied with it,
  // so the result does not depend on candidate order.
  const double lowest = *std::min_element(costs.begin(), costs.end());
  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!tied(costs[i], lowest)) continue;
    if (best == candidates.size()) {
      best = i;
      continue;
    }
    const auto& a = candidates[i];
    const auto& b = candidates[best];
    if (a.size() != b.size() ? a.size() < b.size() : a < b) best = i;
  }
  return best;
}

Admission admit_rreq(bool is_destination, double occupancy_fraction, double energy_fraction,
                     const AdmissionThresholds& thresholds) {
  if (is_destination) return Admission::Forward;
  if (occupancy_fraction > thresholds.queue || energy_fraction < thresholds.energy) {
    return Admission::Suppress;
  }
  return Admission::Forward;
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Head: return "HEAD";
    case Role::Member: return "MEMBER";
    case Role::Gateway: return "GATEWAY";
  }
  return "?";
}

namespace {

bool up(std::span<const std::uint8_t> alive, std::size_t i) {
  return alive.empty() || alive[i] != 0;
}

void add_unique(std::vector<NodeId>& v, NodeId x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.insert(std::upper_bound(v.begin(), v.end(), x), x);
}

}  // namespace

std::vector<ClusterRole> elect_clusters(const topology::LinkSet& links,
                                        std::span<const double> energies,
                                        std::span<const std::uint8_t> alive) {
  const std::size_t n = links.size();
  std::vector<ClusterRole> roles(n);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return energies[a] > energies[b]; });

  std::vector<std::uint8_t> covered(n, 0);
  for (NodeId v : order) {
    if (!up(alive, v) || covered[v]) continue;
    covered[v] = 1;
    roles[v] = ClusterRole{Role::Head, v, {}};
    for (NodeId u : links.adjacency[v]) {
      if (!up(alive, u) || covered[u]) continue;
      covered[u] = 1;
      roles[u] = ClusterRole{Role::Member, v, {}};
    }
  }

  // Members hearing several heads bridge those clusters directly.
  std::set<std::pair<NodeId, NodeId>> bridged;  // (head, head), ordered
  for (NodeId v = 0; v < n; ++v) {
    if (!up(alive, v) || roles[v].role == Role::Head) continue;
    for (NodeId u : links.adjacency[v]) {
      if (!up(alive, u) || roles[u].role != Role::Head || u == roles[v].head) continue;
      add_unique(roles[v].adjacent_heads, u);
    }
    if (!roles[v].adjacent_heads.empty()) {
      roles[v].role = Role::Gateway;
      for (NodeId h : roles[v].adjacent_heads) {
        bridged.insert(std::minmax(h, roles[v].head));
      }
    }
  }

  // Clusters that only touch member-to-member: promote the smallest
  // boundary link's endpoints.
  std::map<std::pair<NodeId, NodeId>, std::pair<NodeId, NodeId>> boundary;
  for (NodeId v = 0; v < n; ++v) {
    if (!up(alive, v) || roles[v].role == Role::Head) continue;
    for (NodeId u : links.adjacency[v]) {
      if (u <= v || !up(alive, u) || roles[u].role == Role::Head) continue;
      if (roles[u].head == roles[v].head) continue;
      const auto key = std::minmax(roles[u].head, roles[v].head);
      if (bridged.contains(key)) continue;
      auto [it, inserted] = boundary.try_emplace(key, v, u);
      if (!inserted && std::make_pair(v, u) < it->second) it->second = {v, u};
    }
  }
  for (const auto& [heads, link] : boundary) {
    const auto [a, b] = link;
    roles[a].role = Role::Gateway;
    roles[b].role = Role::Gateway;
    add_unique(roles[a].adjacent_heads, roles[b].head);
    add_unique(roles[b].adjacent_heads, roles[a].head);
  }

  for (NodeId v = 0; v < n; ++v) {
    if (!up(alive, v)) roles[v] = ClusterRole{Role::Member, kNoNode, {}};
  }
  return roles;
}

std::vector<std::string> check_cluster_roles(const std::vector<ClusterRole>& roles,
                                             const topology::LinkSet& links,
                                             std::span<const std::uint8_t> alive) {
  std::vector<std::string> problems;
  const std::size_t n = links.size();
  if (roles.size() != n) {
    problems.emplace_back("role table size differs from node count");
    return problems;
  }
  for (NodeId v = 0; v < n; ++v) {
    if (!up(alive, v)) continue;
    const auto& r = roles[v];
    const std::string who = "node " + std::to_string(v);
    if (r.head >= n) {
      problems.push_back(who + " has no head");
      continue;
    }
    if (r.role == Role::Head) {
      if (r.head != v) problems.push_back(who + " is a head of another cluster");
      continue;
    }
    if (roles[r.head].role != Role::Head) problems.push_back(who + " points to a non-head");
    if (!links.linked(v, r.head)) problems.push_back(who + " is out of range of its head");
    if (r.role == Role::Gateway) {
      std::set<NodeId> clusters{r.head};
      for (NodeId u : links.adjacency[v]) {
        if (up(alive, u) && roles[u].head < n) clusters.insert(roles[u].head);
      }
      if (clusters.size() < 2) problems.push_back(who + " is a gateway touching one cluster");
    }
  }
  return problems;
}

SourceRoute backbone_path(NodeId source, NodeId destination,
                          const std::vector<ClusterRole>& roles,
                          const topology::LinkSet& links) {
  const std::size_t n = links.size();
  if (source >= n || destination >= n) return {};
  if (source == destination) return {source};
  std::vector<NodeId> parent(n, kNoNode);
  std::vector<std::uint8_t> seen(n, 0);
  std::deque<NodeId> frontier{source};
  seen[source] = 1;
  const bool member_source = !on_backbone(roles[source]);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : links.adjacency[u]) {
      if (seen[v]) continue;
      if (v != destination && !on_backbone(roles[v])) continue;
      if (u == source && member_source && v != destination && v != roles[source].head) continue;
      seen[v] = 1;
      parent[v] = u;
      if (v == destination) {
        SourceRoute path;
        for (NodeId x = destination; x != kNoNode; x = parent[x]) path.push_back(x);
        std::reverse(path.begin(), path.end());
        return path;
      }
      frontier.push_back(v);
    }
  }
  return {};
}

DiscoveryScope clustered_discovery(NodeId source, NodeId destination,
                                   const std::vector<ClusterRole>& roles,
                                   const topology::LinkSet& links) {
  if (!backbone_path(source, destination, roles, links).empty()) return DiscoveryScope::Backbone;
  // Flooding cannot reach a destination the whole network is cut off from.
  return topology::bfs_path(links, source, destination).empty() ? DiscoveryScope::Backbone
                                                                 : DiscoveryScope::Flat;
}

}  // namespace manet::routing
