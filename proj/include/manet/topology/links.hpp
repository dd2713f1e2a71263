#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "manet/topology/geometry.hpp"
#include "manet/types.hpp"

namespace manet::topology {

/// Unit-disk adjacency. Neighbor lists are sorted ascending.
struct LinkSet {
  std::vector<std::vector<NodeId>> adjacency;
  double range = 0.0;

  std::size_t size() const noexcept { return adjacency.size(); }
  bool linked(NodeId a, NodeId b) const;
  std::size_t edge_count() const;

  friend bool operator==(const LinkSet&, const LinkSet&) = default;
};

/// Which implementation of a data-parallel kernel to run. Both produce
/// identical results; Serial is the reference.
enum class Backend : std::uint8_t { Serial, OpenMP };

/// j is adjacent to i iff both are powered and alive (`up`) and their
/// distance is <= range. `up` may be empty, meaning every node is up.
/// Throws std::invalid_argument when range <= 0.
LinkSet rebuild_links(std::span<const Position> positions, double range,
                      std::span<const std::uint8_t> up = {},
                      Backend backend = Backend::OpenMP);

/// True iff the nodes flagged in `alive` form one connected component of
/// `links`. An alive set of one node is connected.
bool is_connected(const LinkSet& links, std::span<const std::uint8_t> alive);

/// Convenience: every node alive.
bool is_connected(const LinkSet& links);

/// Hop distances from `source` over alive nodes; unreachable = -1.
std::vector<int> bfs_hops(const LinkSet& links, NodeId source,
                          std::span<const std::uint8_t> alive = {});

/// One shortest path (fewest hops, smallest ids first), empty if none.
SourceRoute bfs_path(const LinkSet& links, NodeId source, NodeId target,
                     std::span<const std::uint8_t> alive = {});

/// Unordered node pairs within `interference_range` of each other.
std::uint64_t count_interference_edges(std::span<const Position> positions,
                                       double interference_range,
                                       Backend backend = Backend::OpenMP);

}  // namespace manet::topology
