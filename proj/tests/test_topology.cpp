#include <doctest.h>

#include <limits>
#include <sstream>
#include <vector>

#include "manet/error.hpp"
#include "manet/topology/links.hpp"
#include "manet/topology/mobility.hpp"
#include "manet/topology/placement.hpp"
#include "manet/topology/power.hpp"

using namespace manet;
using namespace manet::topology;

namespace {

std::vector<Position> seeded_layout(std::size_t n, std::uint64_t seed, const Area& area = {}) {
  sim::RandomStream s(seed, "layout");
  return random_placement(n, area, s);
}

// Floyd-Warshall hop counts, -1 when unreachable.
std::vector<std::vector<int>> all_pairs_hops(const LinkSet& links) {
  const std::size_t n = links.size();
  constexpr int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (NodeId j : links.adjacency[i]) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  for (auto& row : d)
    for (int& v : row)
      if (v >= inf) v = -1;
  return d;
}

LinkSet from_edges(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
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

}  // namespace

TEST_CASE("rebuild_links on two nodes") {
  const std::vector<Position> p{{0, 0}, {5, 0}};
  CHECK(rebuild_links(p, 10.0).linked(0, 1));
  CHECK_FALSE(rebuild_links(p, 4.0).linked(0, 1));
  CHECK(rebuild_links(p, 5.0).linked(0, 1));
  CHECK_THROWS_AS(rebuild_links(p, 0.0), std::invalid_argument);
  const std::vector<std::uint8_t> up{1, 0};
  CHECK_FALSE(rebuild_links(p, 10.0, up).linked(0, 1));
}

TEST_CASE("rebuild_links matches brute force and is symmetric") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto pos = seeded_layout(30, seed);
    sim::RandomStream s(seed, "up");
    std::vector<std::uint8_t> up(pos.size());
    for (auto& u : up) u = s.bernoulli(0.9) ? 1 : 0;
    const double range = 150.0 + 25.0 * static_cast<double>(seed);
    const auto links = rebuild_links(pos, range, up, Backend::Serial);
    for (NodeId i = 0; i < pos.size(); ++i) {
      for (NodeId j = 0; j < pos.size(); ++j) {
        const bool expect = i != j && up[i] && up[j] && distance(pos[i], pos[j]) <= range;
        REQUIRE(links.linked(i, j) == expect);
        REQUIRE(links.linked(i, j) == links.linked(j, i));
      }
      REQUIRE(std::is_sorted(links.adjacency[i].begin(), links.adjacency[i].end()));
    }
    CHECK(rebuild_links(pos, range, up, Backend::OpenMP) == links);
  }
}

TEST_CASE("is_connected") {
  CHECK(is_connected(from_edges(3, {{0, 1}, {1, 2}})));
  CHECK_FALSE(is_connected(from_edges(3, {{0, 1}})));
  CHECK(is_connected(from_edges(1, {})));
  const std::vector<std::uint8_t> alive{1, 1, 0};
  CHECK(is_connected(from_edges(3, {{0, 1}}), alive));
  const std::vector<std::uint8_t> ends{1, 0, 1};
  CHECK_FALSE(is_connected(from_edges(3, {{0, 1}, {1, 2}}), ends));
}

TEST_CASE("bfs agrees with all-pairs shortest paths") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto links = rebuild_links(seeded_layout(30, seed), 250.0);
    const auto d = all_pairs_hops(links);
    for (NodeId s = 0; s < links.size(); ++s) {
      const auto hops = bfs_hops(links, s);
      for (NodeId t = 0; t < links.size(); ++t) {
        REQUIRE(hops[t] == d[s][t]);
        const auto path = bfs_path(links, s, t);
        if (d[s][t] < 0) {
          REQUIRE(path.empty());
          continue;
        }
        REQUIRE(path.size() == static_cast<std::size_t>(d[s][t]) + 1);
        REQUIRE(path.front() == s);
        REQUIRE(path.back() == t);
        for (std::size_t k = 1; k < path.size(); ++k) REQUIRE(links.linked(path[k - 1], path[k]));
      }
    }
  }
}

TEST_CASE("interference count") {
  const std::vector<Position> two{{0, 0}, {3, 4}};
  CHECK(count_interference_edges(two, 5.0) == 1);
  const std::vector<Position> three{{0, 0}, {1, 0}, {0, 1}};
  CHECK(count_interference_edges(three, 2.0) == 3);

  for (std::size_t n : {10u, 30u, 50u}) {
    const auto pos = seeded_layout(n, n);
    for (double r : {100.0, 300.0, 500.0}) {
      std::uint64_t brute = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (distance(pos[i], pos[j]) <= r) ++brute;
      CHECK(count_interference_edges(pos, r, Backend::Serial) == brute);
      CHECK(count_interference_edges(pos, r, Backend::OpenMP) == brute);
    }
  }
}

TEST_CASE("plan_power_states") {
  const std::vector<double> equal3{5.0, 5.0, 5.0};
  SUBCASE("triangle sleeps exactly one node") {
    CHECK(plan_power_states(from_edges(3, {{0, 1}, {1, 2}, {0, 2}}), equal3).size() == 1);
  }
  SUBCASE("chain sleeps nothing") {
    CHECK(plan_power_states(from_edges(3, {{0, 1}, {1, 2}}), equal3).empty());
  }
  SUBCASE("disconnected input") {
    CHECK_THROWS_AS(plan_power_states(from_edges(3, {{0, 1}}), equal3), NotConnected);
  }
  SUBCASE("protected nodes stay awake") {
    const std::vector<std::uint8_t> prot{1, 1, 1};
    CHECK(plan_power_states(from_edges(3, {{0, 1}, {1, 2}, {0, 2}}), equal3, prot).empty());
  }
  SUBCASE("survivors stay connected on seeded layouts") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const auto links = rebuild_links(seeded_layout(30, seed), 300.0);
      if (!is_connected(links)) continue;
      sim::RandomStream s(seed, "energy");
      std::vector<double> energy(30);
      for (auto& e : energy) e = s.uniform(10.0, 100.0);
      const auto sleep = plan_power_states(links, energy);
      std::vector<std::uint8_t> awake(30, 1);
      for (NodeId v : sleep) awake[v] = 0;
      REQUIRE(is_connected(links, awake));
      for (NodeId v : sleep)
        for (NodeId u : links.adjacency[v]) REQUIRE(awake[u]);
      ++checked;
    }
    CHECK(checked >= 10);
  }
}

TEST_CASE("advance_mobility") {
  const Area area{100.0, 100.0};
  const MobilityParams params{1.0, 5.0, 2.0};
  SUBCASE("static node stays put") {
    sim::RandomStream s(1, "m");
    MobilityState st{{10, 10}, {20, 10}, 0.0, 0.0};
    CHECK(advance_mobility(st, 0.0, 100.0, s, area, params).current == Position{10, 10});
  }
  SUBCASE("linear motion") {
    sim::RandomStream s(1, "m");
    MobilityState st{{0, 0}, {10, 0}, 1.0, 0.0};
    const auto out = advance_mobility(st, 0.0, 3.0, s, area, params);
    CHECK(out.current.x == doctest::Approx(3.0));
    CHECK(out.current.y == doctest::Approx(0.0));
  }
  SUBCASE("pauses on arrival") {
    sim::RandomStream s(1, "m");
    MobilityState st{{0, 0}, {1, 0}, 1.0, 0.0};
    const auto out = advance_mobility(st, 0.0, 2.5, s, area, params);
    CHECK(out.current == Position{1, 0});
    CHECK(out.pause_until == doctest::Approx(3.0));
  }
  SUBCASE("ten thousand steps stay in bounds") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      sim::RandomStream s(seed, "m");
      auto st = make_mobility_state({50, 50}, 0.0);
      Time t = 0.0;
      for (int i = 0; i < 10000; ++i) {
        const Time dt = s.uniform(0.0, 3.0);
        st = advance_mobility(st, t, dt, s, area, params);
        t += dt;
        REQUIRE(area.contains(st.current));
        REQUIRE(area.contains(st.waypoint));
        REQUIRE((st.speed >= params.speed_min && st.speed <= params.speed_max));
      }
    }
  }
}

TEST_CASE("placement parsing") {
  const Area area{100.0, 100.0};
  SUBCASE("valid file with comments") {
    std::istringstream in("# layout\n1 20 30\n0 1.5 2\n\n2 100 0  # corner\n");
    const auto p = parse_placement(in, area);
    REQUIRE(p.size() == 3);
    CHECK(p[0] == Position{1.5, 2});
    CHECK(p[1] == Position{20, 30});
  }
  auto line_of = [&](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_placement(in, area);
    } catch (const ParseError& e) {
      return e.offset();
    }
    return std::size_t{0};
  };
  CHECK(line_of("0 1 1\n1 x 2\n") == 2);
  CHECK(line_of("0 1 1\n0 2 2\n") == 2);
  CHECK(line_of("0 1 1\n\n1 200 2\n") == 3);
  CHECK(line_of("0 1 1 4\n") == 1);
  CHECK(line_of("0 1 1\n2 1 1\n") != 0);
}
