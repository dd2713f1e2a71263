#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "manet/types.hpp"

namespace manet::routing {

struct CachedRoute {
  SourceRoute route;  // starts at the owner
  Time inserted = 0.0;
};

/// Path cache owned by one node. Routes are filed under their last hop;
/// lookups also use prefixes of longer routes that pass through the
/// requested destination.
class RouteCache {
 public:
  explicit RouteCache(NodeId owner = kNoNode, std::size_t per_destination = 4)
      : owner_(owner), per_destination_(per_destination) {}

  NodeId owner() const noexcept { return owner_; }

  /// Inserts a loop-free route that starts at the owner and has at least
  /// one hop. Returns false for invalid or already-present routes. When a
  /// destination already holds `per_destination` routes the oldest goes.
  bool add(const SourceRoute& route, Time now);

  /// Every distinct cached path to `destination`, truncated at it, ordered
  /// by hop count then insertion time (oldest first).
  std::vector<CachedRoute> find_all(NodeId destination) const;

  /// First element of find_all, if any.
  std::optional<SourceRoute> best(NodeId destination) const;

  bool has_route(NodeId destination) const;

  /// Drops every route using the link a-b in either direction.
  std::size_t purge_link(NodeId a, NodeId b);

  /// Drops every route through `node`.
  std::size_t purge_node(NodeId node);

  std::size_t size() const;
  void clear() { routes_.clear(); }

 private:
  NodeId owner_;
  std::size_t per_destination_;
  std::map<NodeId, std::vector<CachedRoute>> routes_;
};

}  // namespace manet::routing
