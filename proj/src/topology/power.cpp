#include "manet/topology/power.hpp"

#include <algorithm>
#include <numeric>

#include "manet/error.hpp"

namespace manet::topology {

std::vector<NodeId> plan_power_states(const LinkSet& links,
                                      std::span<const double> energies,
                                      std::span<const std::uint8_t> protected_nodes,
                                      std::span<const std::uint8_t> alive) {
  const std::size_t n = links.size();
  std::vector<std::uint8_t> awake(n, 1);
  if (!alive.empty()) std::copy(alive.begin(), alive.end(), awake.begin());
  if (!is_connected(links, awake)) {
    throw NotConnected("power planning requires a connected network");
  }

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return energies[a] < energies[b];
  });

  std::vector<std::uint8_t> asleep(n, 0);
  std::vector<NodeId> sleeping;
  for (NodeId v : order) {
    if (!awake[v]) continue;
    if (!protected_nodes.empty() && protected_nodes[v]) continue;
    const auto& nbrs = links.adjacency[v];
    const auto live_nbrs = std::count_if(nbrs.begin(), nbrs.end(),
                                         [&](NodeId u) { return awake[u] != 0; });
    if (live_nbrs < 2) continue;
    if (std::any_of(nbrs.begin(), nbrs.end(), [&](NodeId u) { return asleep[u] != 0; })) {
      continue;
    }
    awake[v] = 0;
    if (is_connected(links, awake)) {
      asleep[v] = 1;
      sleeping.push_back(v);
    } else {
      awake[v] = 1;
    }
  }
  std::sort(sleeping.begin(), sleeping.end());
  return sleeping;
}

}  // namespace manet::topology
