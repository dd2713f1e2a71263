#include <doctest.h>

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "manet/error.hpp"
#include "manet/routing/dsr.hpp"
#include "manet/routing/nfpqr.hpp"
#include "manet/routing/packet.hpp"
#include "manet/routing/route_cache.hpp"
#include "manet/sim/random.hpp"
#include "manet/topology/links.hpp"
#include "manet/topology/placement.hpp"

using namespace manet;
using namespace manet::routing;
using topology::LinkSet;

namespace {

LinkSet graph(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  LinkSet l;
  l.range = 1.0;
  l.adjacency.resize(n);
  for (auto [a, b] : edges) {
    l.adjacency[a].push_back(b);
    l.adjacency[b].push_back(a);
  }
  for (auto& adj : l.adjacency) std::sort(adj.begin(), adj.end());
  return l;
}

struct FloodResult {
  std::vector<SourceRoute> replies;
  std::map<NodeId, int> forwards;
  int rreq_tx = 0;
};

// Synchronous flood: every transmission reaches all neighbors one hop
// later. `suppressed` nodes decline to rebroadcast.
FloodResult flood(const LinkSet& links, NodeId src, NodeId dst, const DsrParams& params,
                  const std::set<NodeId>& suppressed = {}, std::uint32_t ttl = 16) {
  std::vector<SeenRequests> seen(links.size());
  std::vector<RouteCache> caches;
  for (NodeId v = 0; v < links.size(); ++v) caches.emplace_back(v);
  FloodResult out;
  DsrAgent agent(src, params);
  Packet rreq = agent.new_rreq(dst);
  rreq.ttl = ttl;
  seen[src].record(src, rreq.request_id, 0.0);
  std::deque<std::pair<NodeId, Packet>> air{{src, rreq}};
  ++out.rreq_tx;
  while (!air.empty()) {
    auto [tx, p] = air.front();
    air.pop_front();
    for (NodeId v : links.adjacency[tx]) {
      const auto r = handle_rreq(v, p, seen[v], caches[v], params, 0.0);
      if (r.decision == RreqDecision::Reply) out.replies.push_back(r.reply_route);
      if (r.decision != RreqDecision::Forward) continue;
      if (admit_rreq(v == dst, suppressed.contains(v) ? 1.0 : 0.0, 1.0, {}) == Admission::Suppress) continue;
      ++out.forwards[v];
      ++out.rreq_tx;
      air.emplace_back(v, forwarded_rreq(p, v));
    }
  }
  return out;
}

// Every simple path src -> dst avoiding `banned`.
void enumerate(const LinkSet& links, NodeId at, NodeId dst, const std::set<NodeId>& banned,
               SourceRoute& path, std::vector<SourceRoute>& out) {
  if (at == dst) {
    out.push_back(path);
    return;
  }
  for (NodeId n : links.adjacency[at]) {
    if (position_in(path, n) < path.size() || (banned.contains(n) && n != dst)) continue;
    path.push_back(n);
    enumerate(links, n, dst, banned, path, out);
    path.pop_back();
  }
}

}  // namespace

TEST_CASE("route helpers") {
  CHECK(loop_free({0, 1, 2}));
  CHECK_FALSE(loop_free({0, 1, 0}));
  CHECK(position_in({4, 5, 6}, 6) == 2);
  CHECK(position_in({4, 5, 6}, 7) == 3);
  CHECK(contains_link({0, 1, 2}, 2, 1));
  CHECK_FALSE(contains_link({0, 1, 2}, 0, 2));
  CHECK(splice_routes({0, 1, 2}, {2, 3}) == SourceRoute{0, 1, 2, 3});
  CHECK(splice_routes({0, 1, 2}, {2, 1, 5}) == SourceRoute{0, 1, 5});
}

TEST_CASE("route cache") {
  RouteCache c(0, 2);
  CHECK_FALSE(c.add({1, 2}, 0.0));
  CHECK_FALSE(c.add({0, 1, 0}, 0.0));
  CHECK(c.add({0, 1, 2}, 0.0));
  CHECK_FALSE(c.add({0, 1, 2}, 1.0));
  CHECK(c.add({0, 3, 2}, 1.0));
  SUBCASE("prefix lookup") {
    CHECK(c.has_route(1));
    CHECK(c.best(1) == SourceRoute{0, 1});
  }
  SUBCASE("ordering and eviction") {
    CHECK(c.add({0, 4, 5, 2}, 2.0));
    CHECK(c.add({0, 5, 2}, 3.0));
    const auto all = c.find_all(2);
    REQUIRE(all.size() == 2);
    CHECK(all[0].route == SourceRoute{0, 5, 2});
    CHECK(all[1].route == SourceRoute{0, 4, 5, 2});
  }
  SUBCASE("purge a broken link") {
    CHECK(c.purge_link(2, 1) == 1);
    CHECK(c.best(2) == SourceRoute{0, 3, 2});
    CHECK(RouteCache(0).purge_link(1, 2) == 0);
  }
  SUBCASE("purge a node") {
    CHECK(c.purge_node(3) == 1);
    CHECK(c.size() == 1);
  }
}

TEST_CASE("chain discovery") {
  const auto chain = graph(3, {{0, 1}, {1, 2}});
  DsrParams params;
  params.cache_reply = false;
  const auto r = flood(chain, 0, 2, params);
  REQUIRE(r.replies.size() == 1);
  CHECK(r.replies[0] == SourceRoute{0, 1, 2});
  CHECK(r.forwards.at(1) == 1);
}

TEST_CASE("handle_rreq drop reasons") {
  DsrParams params;
  RouteCache cache(1);
  SeenRequests seen;
  Packet rreq = DsrAgent(0, params).new_rreq(5);
  const auto first = handle_rreq(1, rreq, seen, cache, params, 0.0);
  CHECK(first.decision == RreqDecision::Forward);
  const auto dup = handle_rreq(1, rreq, seen, cache, params, 0.1);
  CHECK(dup.reason == RreqDropReason::Duplicate);

  Packet loop = rreq;
  loop.traversed = {0, 2};
  CHECK(handle_rreq(2, loop, seen, cache, params, 0.0).reason == RreqDropReason::Loop);

  Packet dead = rreq;
  dead.request_id = 99;
  dead.ttl = 0;
  CHECK(handle_rreq(3, dead, seen, cache, params, 0.0).reason == RreqDropReason::TtlExpired);

  SUBCASE("cache reply splices the cached suffix") {
    RouteCache c7(7);
    c7.add({7, 8, 5}, 0.0);
    Packet p = rreq;
    p.request_id = 50;
    p.traversed = {0, 3};
    SeenRequests s;
    const auto out = handle_rreq(7, p, s, c7, params, 0.0);
    CHECK(out.decision == RreqDecision::Reply);
    CHECK(out.reply_route == SourceRoute{0, 3, 7, 8, 5});
  }
  SUBCASE("forwarded copy") {
    const auto f = forwarded_rreq(rreq, 1, 0.25);
    CHECK(f.traversed == SourceRoute{0, 1});
    CHECK(f.ttl == rreq.ttl - 1);
    CHECK(f.hop_costs.back() == 0.25);
  }
}

TEST_CASE("flooding on random graphs finds BFS-shortest loop-free routes") {
  DsrParams params;
  params.cache_reply = false;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    sim::RandomStream s(seed, "layout");
    const auto links = topology::rebuild_links(topology::random_placement(30, {}, s), 250.0);
    for (NodeId dst = 1; dst < 30; dst += 7) {
      const auto r = flood(links, 0, dst, params, {}, 64);
      CHECK(r.rreq_tx <= 30);
      for (const auto& [v, n] : r.forwards) CHECK(n == 1);
      const auto hops = topology::bfs_hops(links, 0);
      if (hops[dst] < 0) {
        CHECK(r.replies.empty());
        continue;
      }
      REQUIRE(r.replies.size() == 1);
      CHECK(loop_free(r.replies[0]));
      CHECK(static_cast<int>(r.replies[0].size()) - 1 == hops[dst]);
    }
  }
}

TEST_CASE("forward_data") {
  Packet d;
  d.route = {0, 1, 2};
  CHECK(forward_data(1, d).next_hop == 2);
  CHECK(forward_data(2, d).decision == DataDecision::Deliver);
  CHECK_THROWS_AS(forward_data(5, d), InvariantViolation);
}

TEST_CASE("promiscuous learning") {
  SUBCASE("on-route DATA suffix") {
    RouteCache b(1);
    Packet d;
    d.kind = PacketKind::DATA;
    d.route = {0, 1, 2, 3};
    CHECK(promiscuous_learn(b, d, 0, true, 0.0) == 1);
    CHECK(b.best(3) == SourceRoute{1, 2, 3});
  }
  SUBCASE("reverse RREQ path") {
    RouteCache c(2);
    Packet r;
    r.kind = PacketKind::RREQ;
    r.traversed = {0, 1};
    CHECK(promiscuous_learn(c, r, 1, true, 0.0) == 1);
    CHECK(c.best(0) == SourceRoute{2, 1, 0});
  }
  SUBCASE("disabled") {
    RouteCache c(2);
    Packet r;
    r.kind = PacketKind::RREQ;
    r.traversed = {0, 1};
    CHECK(promiscuous_learn(c, r, 1, false, 0.0) == 0);
    CHECK(c.size() == 0);
  }
}

TEST_CASE("dsr agent origination") {
  DsrParams params;
  params.send_buffer = 2;
  DsrAgent a(0, params);
  Packet d;
  d.kind = PacketKind::DATA;
  d.source = 0;
  d.destination = 0;
  CHECK(a.originate(d, 0.0).kind == DsrAgent::OriginateKind::DeliverLocal);

  d.destination = 2;
  const auto miss = a.originate(d, 0.0);
  CHECK(miss.kind == DsrAgent::OriginateKind::StartDiscovery);
  const auto id = miss.rreq.request_id;
  CHECK(miss.rreq.traversed == SourceRoute{0});
  a.begin_discovery(2);
  CHECK(a.originate(d, 0.1).kind == DsrAgent::OriginateKind::Buffered);
  CHECK(a.originate(d, 0.2).kind == DsrAgent::OriginateKind::Dropped);
  CHECK(a.new_rreq(2).request_id == id + 1);

  a.cache().add({0, 1, 2}, 0.3);
  const auto released = a.release_pending(2);
  CHECK(released.size() == 2);
  CHECK(released[0].route == SourceRoute{0, 1, 2});
  CHECK(a.pending_count() == 0);
  CHECK(a.originate(d, 0.4).kind == DsrAgent::OriginateKind::Send);

  Packet rerr;
  rerr.kind = PacketKind::RERR;
  rerr.broken_link = {1, 2};
  CHECK(a.handle_rerr(rerr) == 1);
  CHECK_FALSE(a.cache().has_route(2));
}

TEST_CASE("discovery timeout doubles up to the cap") {
  DsrAgent a(0, DsrParams{});
  std::vector<Time> t;
  for (int i = 0; i < 6; ++i) t.push_back(a.begin_discovery(3));
  CHECK(t == std::vector<Time>{0.5, 1.0, 2.0, 4.0, 8.0, 8.0});
  a.end_discovery(3);
  CHECK(a.begin_discovery(3) == 0.5);
}

TEST_CASE("send buffer expiry") {
  DsrParams params;
  params.send_buffer_timeout = 5.0;
  DsrAgent a(0, params);
  Packet d;
  d.destination = 4;
  a.originate(d, 0.0);
  a.originate(d, 3.0);
  CHECK(a.expire_pending(5.0).size() == 1);
  CHECK(a.pending_count() == 1);
  CHECK(a.drain_pending().size() == 1);
}

TEST_CASE("node cost") {
  const CostWeights w{1.0, 1.0, 0.5};
  CHECK(node_cost(0.0, 1.0, w).scalar == 0.0);
  CHECK(node_cost(0.5, 0.0, w).scalar == doctest::Approx(2.0));
  CHECK(node_cost(5.0, 0.0, w).scalar == doctest::Approx(2.0));
  CHECK(node_cost(0.25, 0.75, w).scalar == doctest::Approx(0.75));
  CHECK_THROWS_AS(node_cost(0.0, 1.0, {-1.0, 1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(node_cost(0.0, 1.0, {0.0, 0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(node_cost(0.0, 1.0, {1.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("route cost and selection") {
  std::map<NodeId, double> cost{{1, 0.3}, {2, 0.9}, {3, 0.1}, {4, 0.1}, {5, 0.0}, {6, 0.0}};
  const CostLookup lookup = [&](NodeId v) { return cost.count(v) ? cost.at(v) : 0.0; };
  CHECK(route_cost({0, 9}, lookup) == 0.0);
  CHECK(route_cost({0, 3, 4, 9}, lookup) == doctest::Approx(0.2));

  const std::vector<SourceRoute> cheap_long{{0, 2, 9}, {0, 1, 3, 4, 9}};
  CHECK(select_route(cheap_long, lookup) == 1);
  const std::vector<SourceRoute> hops{{0, 5, 6, 9}, {0, 6, 9}};
  CHECK(select_route(hops, lookup) == 1);
  const std::vector<SourceRoute> lex{{0, 6, 9}, {0, 5, 9}};
  CHECK(select_route(lex, lookup) == 1);
}

TEST_CASE("route selection is invariant under cost scaling") {
  sim::RandomStream s(3, "select");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> base(12);
    for (auto& c : base) c = s.bernoulli(0.2) ? 0.0 : s.uniform(0.0, 2.0);
    std::vector<SourceRoute> routes;
    for (int r = 0; r < 5; ++r) {
      SourceRoute route{0};
      std::vector<NodeId> pool{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      const std::size_t mid = 1 + s.index(4);
      for (std::size_t k = 0; k < mid; ++k) {
        const auto i = s.index(pool.size());
        route.push_back(pool[i]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
      }
      route.push_back(11);
      routes.push_back(route);
    }
    const auto pick = select_route(routes, [&](NodeId v) { return base[v]; });
    for (double k : {1e-3, 0.5, 7.0, 1e4}) {
      REQUIRE(select_route(routes, [&](NodeId v) { return k * base[v]; }) == pick);
    }
  }
}

TEST_CASE("admission thresholds") {
  const AdmissionThresholds t{};
  CHECK(admit_rreq(false, 0.9, 1.0, t) == Admission::Suppress);
  CHECK(admit_rreq(false, 0.0, 1.0, t) == Admission::Forward);
  CHECK(admit_rreq(false, 0.0, 0.05, t) == Admission::Suppress);
  CHECK(admit_rreq(true, 1.0, 0.0, t) == Admission::Forward);
}

TEST_CASE("suppressed relay steers discovery to the long path") {
  // 0-1-4 is short; 0-2-3-4 is long; relay 1 is congested.
  const auto links = graph(5, {{0, 1}, {1, 4}, {0, 2}, {2, 3}, {3, 4}});
  DsrParams params;
  params.cache_reply = false;
  const std::set<NodeId> busy{1};
  const auto r = flood(links, 0, 4, params, busy);

  std::vector<SourceRoute> paths;
  SourceRoute start{0};
  enumerate(links, 0, 4, busy, start, paths);
  const auto shortest = std::min_element(paths.begin(), paths.end(),
                                         [](const auto& a, const auto& b) { return a.size() < b.size(); });
  REQUIRE(r.replies.size() == 1);
  CHECK(r.replies[0] == *shortest);
  CHECK(r.replies[0] == SourceRoute{0, 2, 3, 4});
  CHECK(flood(links, 0, 4, params).replies[0] == SourceRoute{0, 1, 4});
}

TEST_CASE("cluster election examples") {
  SUBCASE("singleton") {
    const auto roles = elect_clusters(graph(1, {}), std::vector<double>{1.0});
    CHECK(roles[0].role == Role::Head);
    CHECK(roles[0].head == 0);
  }
  SUBCASE("five-node line") {
    const auto links = graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    const auto roles = elect_clusters(links, std::vector<double>(5, 1.0));
    CHECK(roles[0].role == Role::Head);
    CHECK(roles[2].role == Role::Head);
    CHECK(roles[4].role == Role::Head);
    CHECK(roles[1].role == Role::Gateway);
    CHECK(roles[3].role == Role::Gateway);
    CHECK(check_cluster_roles(roles, links).empty());
  }
  SUBCASE("dead nodes have no head") {
    const auto links = graph(3, {{0, 1}, {1, 2}});
    const std::vector<std::uint8_t> alive{1, 0, 1};
    const auto roles = elect_clusters(links, std::vector<double>(3, 1.0), alive);
    CHECK(roles[1].head == kNoNode);
    CHECK(check_cluster_roles(roles, links, alive).empty());
  }
}

TEST_CASE("cluster invariants on random layouts") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    sim::RandomStream s(seed, "layout");
    const auto links = topology::rebuild_links(topology::random_placement(30, {}, s), 250.0);
    std::vector<double> energy(30);
    std::vector<std::uint8_t> alive(30);
    for (std::size_t i = 0; i < 30; ++i) {
      energy[i] = s.uniform(1.0, 100.0);
      alive[i] = s.bernoulli(0.9) ? 1 : 0;
    }
    const auto roles = elect_clusters(links, energy, alive);
    const auto problems = check_cluster_roles(roles, links, alive);
    CHECK_MESSAGE(problems.empty(), "seed " << seed << ": " << (problems.empty() ? "" : problems[0]));
    for (NodeId v = 0; v < 30; ++v) {
      if (!alive[v]) continue;
      if (roles[v].role == Role::Head) {
        REQUIRE(roles[v].head == v);
      } else {
        REQUIRE(links.linked(v, roles[v].head));
        REQUIRE(roles[roles[v].head].role == Role::Head);
      }
    }
  }
}

TEST_CASE("two clusters joined by a gateway") {
  // Cluster {0: 1, 2, 3} and cluster {4: 5}; 3 hears both heads.
  const auto links = graph(6, {{0, 1}, {0, 2}, {0, 3}, {3, 4}, {4, 5}});
  const std::vector<double> energy{10, 1, 1, 1, 9, 1};
  const auto roles = elect_clusters(links, energy);
  REQUIRE(roles[0].role == Role::Head);
  REQUIRE(roles[4].role == Role::Head);
  REQUIRE(roles[3].role == Role::Gateway);
  CHECK(check_cluster_roles(roles, links).empty());

  const auto path = backbone_path(1, 5, roles, links);
  CHECK(path == SourceRoute{1, 0, 3, 4, 5});
  CHECK(clustered_discovery(1, 5, roles, links) == DiscoveryScope::Backbone);
  CHECK(backbone_path(1, 2, roles, links) == SourceRoute{1, 0, 2});
}

TEST_CASE("member-only connection falls back to flat discovery") {
  // Heads 0 and 3 touch only through 1 and 2, which election promotes.
  // Demoting them by hand leaves a path through Members alone.
  const auto links = graph(4, {{0, 1}, {1, 2}, {2, 3}});
  const std::vector<double> energy{10, 1, 1, 9};
  auto roles = elect_clusters(links, energy);
  CHECK(clustered_discovery(0, 3, roles, links) == DiscoveryScope::Backbone);
  roles[1].role = Role::Member;
  roles[2].role = Role::Member;
  CHECK(backbone_path(0, 3, roles, links).empty());
  CHECK(clustered_discovery(0, 3, roles, links) == DiscoveryScope::Flat);
  CHECK(clustered_discovery(0, 3, roles, graph(4, {{0, 1}})) == DiscoveryScope::Backbone);
}
