#include "manet/routing/route_cache.hpp"

#include <algorithm>

#include "manet/routing/packet.hpp"

namespace manet::routing {

bool RouteCache::add(const SourceRoute& route, Time now) {
  if (route.size() < 2 || route.front() != owner_ || !loop_free(route)) return false;
  auto& bucket = routes_[route.back()];
  if (std::any_of(bucket.begin(), bucket.end(),
                  [&](const CachedRoute& c) { return c.route == route; })) {
    return false;
  }
  if (bucket.size() >= per_destination_) {
    auto oldest = std::min_element(bucket.begin(), bucket.end(), [](const auto& a, const auto& b) {
      return a.inserted < b.inserted;
    });
    bucket.erase(oldest);
  }
  bucket.push_back(CachedRoute{route, now});
  return true;
}

std::vector<CachedRoute> RouteCache::find_all(NodeId destination) const {
  std::vector<CachedRoute> out;
  for (const auto& [last, bucket] : routes_) {
    for (const auto& entry : bucket) {
      const std::size_t pos = position_in(entry.route, destination);
      if (pos == 0 || pos >= entry.route.size()) continue;
      SourceRoute prefix(entry.route.begin(),
                         entry.route.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
      auto dup = std::find_if(out.begin(), out.end(),
                              [&](const CachedRoute& c) { return c.route == prefix; });
      if (dup != out.end()) {
        dup->inserted = std::min(dup->inserted, entry.inserted);
      } else {
        out.push_back(CachedRoute{std::move(prefix), entry.inserted});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CachedRoute& a, const CachedRoute& b) {
    if (a.route.size() != b.route.size()) return a.route.size() < b.route.size();
    if (a.inserted != b.inserted) return a.inserted < b.inserted;
    return a.route < b.route;
  });
  return out;
}

std::optional<SourceRoute> RouteCache::best(NodeId destination) const {
  auto all = find_all(destination);
  if (all.empty()) return std::nullopt;
  return std::move(all.front().route);
}

bool RouteCache::has_route(NodeId destination) const {
  for (const auto& [last, bucket] : routes_) {
    for (const auto& entry : bucket) {
      const std::size_t pos = position_in(entry.route, destination);
      if (pos > 0 && pos < entry.route.size()) return true;
    }
  }
  return false;
}

std::size_t RouteCache::purge_link(NodeId a, NodeId b) {
  std::size_t removed = 0;
  for (auto it = routes_.begin(); it != routes_.end();) {
    auto& bucket = it->second;
    const auto before = bucket.size();
    std::erase_if(bucket, [&](const CachedRoute& c) { return contains_link(c.route, a, b); });
    removed += before - bucket.size();
    it = bucket.empty() ? routes_.erase(it) : std::next(it);
  }
  return removed;
}

std::size_t RouteCache::purge_node(NodeId node) {
  std::size_t removed = 0;
  for (auto it = routes_.begin(); it != routes_.end();) {
    auto& bucket = it->second;
    const auto before = bucket.size();
    std::erase_if(bucket, [&](const CachedRoute& c) {
      return position_in(c.route, node) < c.route.size();
    });
    removed += before - bucket.size();
    it = bucket.empty() ? routes_.erase(it) : std::next(it);
  }
  return removed;
}

std::size_t RouteCache::size() const {
  std::size_t total = 0;
  for (const auto& [last, bucket] : routes_) total += bucket.size();
  return total;
}

}  // namespace manet::routing
