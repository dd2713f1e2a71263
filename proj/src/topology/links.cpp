#include "manet/topology/links.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace manet::topology {

namespace {

bool is_up(std::span<const std::uint8_t> up, std::size_t i) {
  return up.empty() || up[i] != 0;
}

void fill_row(std::span<const Position> positions, double range_sq,
              std::span<const std::uint8_t> up, std::size_t i,
              std::vector<NodeId>& row) {
  row.clear();
  if (!is_up(up, i)) return;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (j == i || !is_up(up, j)) continue;
    if (distance_squared(positions[i], positions[j]) <= range_sq) {
      row.push_back(static_cast<NodeId>(j));
    }
  }
}

}  // namespace

bool LinkSet::linked(NodeId a, NodeId b) const {
  if (a >= adjacency.size()) return false;
  const auto& row = adjacency[a];
  return std::binary_search(row.begin(), row.end(), b);
}

std::size_t LinkSet::edge_count() const {
  std::size_t total = 0;
  for (const auto& row : adjacency) total += row.size();
  return total / 2;
}

LinkSet rebuild_links(std::span<const Position> positions, double range,
                      std::span<const std::uint8_t> up, Backend backend) {
  if (!(range > 0.0)) throw std::invalid_argument("link range must be positive");
  LinkSet links;
  links.range = range;
  links.adjacency.resize(positions.size());
  const double range_sq = range * range;
  const auto n = static_cast<std::ptrdiff_t>(positions.size());

  // Each row is written by exactly one iteration. distance_squared(i, j)
  // and distance_squared(j, i) are bitwise equal, so rows agree pairwise.
  if (backend == Backend::OpenMP) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      fill_row(positions, range_sq, up, static_cast<std::size_t>(i),
               links.adjacency[static_cast<std::size_t>(i)]);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      fill_row(positions, range_sq, up, static_cast<std::size_t>(i),
               links.adjacency[static_cast<std::size_t>(i)]);
    }
  }
  return links;
}

std::vector<int> bfs_hops(const LinkSet& links, NodeId source,
                          std::span<const std::uint8_t> alive) {
  std::vector<int> hops(links.size(), -1);
  if (source >= links.size() || !is_up(alive, source)) return hops;
  std::deque<NodeId> frontier{source};
  hops[source] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : links.adjacency[u]) {
      if (hops[v] >= 0 || !is_up(alive, v)) continue;
      hops[v] = hops[u] + 1;
      frontier.push_back(v);
    }
  }
  return hops;
}

SourceRoute bfs_path(const LinkSet& links, NodeId source, NodeId target,
                     std::span<const std::uint8_t> alive) {
  if (source >= links.size() || target >= links.size()) return {};
  std::vector<NodeId> parent(links.size(), kNoNode);
  std::vector<std::uint8_t> seen(links.size(), 0);
  std::deque<NodeId> frontier;
  if (!is_up(alive, source)) return {};
  frontier.push_back(source);
  seen[source] = 1;
  while (!frontier.empty() && !seen[target]) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : links.adjacency[u]) {
      if (seen[v] || !is_up(alive, v)) continue;
      seen[v] = 1;
      parent[v] = u;
      frontier.push_back(v);
    }
  }
  if (!seen[target]) return {};
  SourceRoute path;
  for (NodeId v = target; v != kNoNode; v = parent[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

bool is_connected(const LinkSet& links, std::span<const std::uint8_t> alive) {
  std::size_t alive_count = 0;
  NodeId first = kNoNode;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!is_up(alive, i)) continue;
    ++alive_count;
    if (first == kNoNode) first = static_cast<NodeId>(i);
  }
  if (alive_count <= 1) return true;
  const auto hops = bfs_hops(links, first, alive);
  const auto reached = static_cast<std::size_t>(
      std::count_if(hops.begin(), hops.end(), [](int h) { return h >= 0; }));
  return reached == alive_count;
}

bool is_connected(const LinkSet& links) { return is_connected(links, {}); }

std::uint64_t count_interference_edges(std::span<const Position> positions,
                                       double interference_range,
                                       Backend backend) {
  const double range_sq = interference_range * interference_range;
  const auto n = static_cast<std::ptrdiff_t>(positions.size());
  std::uint64_t total = 0;
  if (backend == Backend::OpenMP) {
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : total)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::ptrdiff_t j = i + 1; j < n; ++j) {
        if (distance_squared(positions[i], positions[j]) <= range_sq) ++total;
      }
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::ptrdiff_t j = i + 1; j < n; ++j) {
        if (distance_squared(positions[i], positions[j]) <= range_sq) ++total;
      }
    }
  }
  return total;
}

}  // namespace manet::topology
