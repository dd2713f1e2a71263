#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "manet/error.hpp"
#include "manet/sim/random.hpp"
#include "manet/sim/simulator.hpp"

using namespace manet;
using namespace manet::sim;

TEST_CASE("events dispatch in time order") {
  Simulator sim;
  std::vector<int> order;
  sim.schedule(2.0, EventKind::Timer, [&] { order.push_back(2); });
  sim.schedule(1.0, EventKind::Timer, [&] { order.push_back(1); });
  sim.run_until(kForever);
  CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("simultaneous events keep insertion order") {
  Simulator sim;
  std::vector<char> order;
  sim.schedule(1.0, EventKind::Timer, [&] { order.push_back('A'); });
  sim.schedule(1.0, EventKind::PacketArrival, [&] { order.push_back('B'); });
  sim.run_until(kForever);
  CHECK(order == std::vector<char>{'A', 'B'});
}

TEST_CASE("scheduling in the past") {
  Simulator sim;
  sim.schedule(1.0, EventKind::Timer, [] {});
  sim.run_until(1.0);
  CHECK_THROWS_AS(sim.schedule(0.5, EventKind::Timer, [] {}), SchedulingInPast);
  CHECK_THROWS_AS(sim.schedule(std::nan(""), EventKind::Timer, [] {}), SchedulingInPast);

  // An undershoot inside the tie window runs at the current clock.
  Time seen = -1.0;
  sim.schedule(1.0 - 1e-13, EventKind::Timer, [&] { seen = sim.now(); });
  sim.run_until(kForever);
  CHECK(seen == 1.0);
}

TEST_CASE("run_until boundaries") {
  SUBCASE("empty list advances the clock") {
    Simulator sim;
    CHECK(sim.run_until(10.0) == 10.0);
    CHECK(sim.dispatched() == 0);
  }
  SUBCASE("stops at t_end") {
    Simulator sim;
    for (double t : {1.0, 2.0, 3.0}) sim.schedule(t, EventKind::Timer, [] {});
    CHECK(sim.run_until(2.5) == 2.5);
    CHECK(sim.dispatched() == 2);
    CHECK(sim.pending() == 1);
  }
  SUBCASE("event exactly at t_end runs") {
    Simulator sim;
    bool ran = false;
    sim.schedule(2.0, EventKind::Timer, [&] { ran = true; });
    sim.run_until(2.0);
    CHECK(ran);
  }
}

TEST_CASE("cancelled events are skipped") {
  Simulator sim;
  int hits = 0;
  auto h = sim.schedule(1.0, EventKind::Timer, [&] { ++hits; });
  sim.schedule(2.0, EventKind::Timer, [&] { ++hits; });
  sim.cancel(h);
  sim.cancel(h);
  CHECK(sim.pending() == 1);
  sim.run_until(kForever);
  CHECK(hits == 1);
  sim.cancel(EventHandle{999});  // unknown handle is ignored
  CHECK(sim.pending() == 0);
}

TEST_CASE("stop returns after the current event") {
  Simulator sim;
  int hits = 0;
  sim.schedule(1.0, EventKind::Timer, [&] {
    ++hits;
    sim.stop();
  });
  sim.schedule(2.0, EventKind::Timer, [&] { ++hits; });
  CHECK(sim.run_until(10.0) == 1.0);
  CHECK(hits == 1);
  sim.run_until(10.0);
  CHECK(hits == 2);
}

TEST_CASE("dispatch order is a total order on (time, seq)") {
  RandomStream rng(7, "order");
  Simulator sim;
  std::vector<std::pair<Time, std::uint64_t>> seen;
  // Handlers schedule further events, some at the current time.
  std::function<void(int)> spawn = [&](int depth) {
    if (depth == 0) return;
    for (int i = 0; i < 2; ++i) {
      const Time dt = rng.bernoulli(0.3) ? 0.0 : rng.uniform(0.0, 1.0);
      sim.schedule_in(dt, EventKind::Timer, [&, depth] { spawn(depth - 1); });
    }
  };
  for (int i = 0; i < 20; ++i) {
    sim.schedule(rng.uniform(0.0, 5.0), EventKind::Timer, [&] { spawn(6); });
  }
  Time last_clock = 0.0;
  sim.set_observer([&](const Event& e) {
    seen.emplace_back(e.time, e.seq);
    CHECK(e.time >= last_clock);
    last_clock = e.time;
  });
  sim.run_until(kForever);
  REQUIRE(seen.size() > 1000);
  for (std::size_t i = 1; i < seen.size(); ++i) {
    const bool ordered = seen[i - 1].first < seen[i].first ||
                         (seen[i - 1].first == seen[i].first && seen[i - 1].second < seen[i].second);
    REQUIRE(ordered);
  }
}

TEST_CASE("a million self-rescheduling arrivals") {
  Simulator sim;
  RandomStream rng(3, "arrivals");
  std::uint64_t left = 1000000;
  std::function<void()> arrive = [&] {
    if (--left > 0) sim.schedule_in(rng.exponential(1.0), EventKind::TrafficGen, arrive);
  };
  sim.schedule(0.0, EventKind::TrafficGen, arrive);
  sim.run_until(kForever);
  CHECK(sim.dispatched() == 1000000);
}

TEST_CASE("random streams are reproducible and distinct") {
  RandomStream a(42, "service/3"), b(42, "service/3"), c(42, "service/4"), d(43, "service/3");
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("stream output is pinned across platforms") {
  // mt19937_64's sequence is fixed by the standard; the seed mixing is
  // pinned here so a change to either is caught.
  std::mt19937_64 reference(splitmix64(1 ^ splitmix64(fnv1a("x"))));
  RandomStream s(1, "x");
  CHECK(s.next_u64() == reference());
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("exponential draws") {
  SUBCASE("rate 2 has mean 0.5") {
    RandomStream s(11, "exp");
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += s.exponential(2.0);
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  }
  SUBCASE("first sample repeats") {
    RandomStream a(5, "exp"), b(5, "exp");
    CHECK(draw_exponential(a, 1.0) == draw_exponential(b, 1.0));
  }
  SUBCASE("non-positive rate") {
    RandomStream s(1, "exp");
    CHECK_THROWS_AS(s.exponential(0.0), NonPositiveRate);
    CHECK_THROWS_AS(s.exponential(-1.0), NonPositiveRate);
    CHECK_THROWS_AS(s.exponential(std::numeric_limits<double>::quiet_NaN()), NonPositiveRate);
  }
  SUBCASE("samples are non-negative and finite") {
    RandomStream s(9, "exp");
    for (int i = 0; i < 100000; ++i) {
      const double x = s.exponential(3.0);
      REQUIRE(x >= 0.0);
      REQUIRE(std::isfinite(x));
    }
  }
}

TEST_CASE("uniform helpers stay in range") {
  RandomStream s(2, "u");
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(s.index(7) < 7);
    const double v = s.uniform(-3.0, 4.0);
    REQUIRE(v >= -3.0);
    REQUIRE(v < 4.0);
  }
}
