#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "manet/error.hpp"
#include "manet/queueing/kendall.hpp"
#include "manet/queueing/measures.hpp"
#include "manet/queueing/queue_sim.hpp"
#include "manet/queueing/service_queue.hpp"
#include "manet/sim/random.hpp"

using namespace manet;
using namespace manet::queueing;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::size_t parse_error_offset(const std::string& text) {
  try {
    parse_kendall(text);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("no ParseError for " << text);
  return 0;
}

}  // namespace

TEST_CASE("kendall examples") {
  const auto a = parse_kendall("[M/M/1]:{inf/inf/FCFS}");
  CHECK(a == KendallSpec{DistributionCode::M, DistributionCode::M, 1, std::nullopt, std::nullopt, Ranking::FCFS});
  const auto b = parse_kendall("[GI/G/3]:{10/inf/PRI}");
  CHECK(b == KendallSpec{DistributionCode::GI, DistributionCode::G, 3, 10, std::nullopt, Ranking::PRI});
  CHECK(parse_kendall("[E/M/2]:{INF/50/LCFS}").population == 50u);
  CHECK(format_kendall(parse_kendall("[M/M/1]:{Inf/iNF/FCFS}")) == "[M/M/1]:{inf/inf/FCFS}");
}

TEST_CASE("kendall rejections carry the offending offset") {
  CHECK(parse_error_offset("[X/M/1]:{inf/inf/FCFS}") == 1);
  CHECK(parse_error_offset("[M/X/1]:{inf/inf/FCFS}") == 3);
  CHECK(parse_error_offset("[M/M/0]:{inf/inf/FCFS}") == 5);
  CHECK(parse_error_offset("[M/M/1]{inf/inf/FCFS}") == 7);
  CHECK(parse_error_offset("[M/M/1]:{inf/inf/FIFO}") == 17);
  CHECK(parse_error_offset("[M/M/1]:{inf/inf/FCFS}x") == 22);
  CHECK(parse_error_offset("[M/M/1]:{inf/inf/FCFS") == 21);
  CHECK(parse_error_offset(" [M/M/1]:{inf/inf/FCFS}") == 0);
  CHECK(parse_error_offset("") == 0);
}

TEST_CASE("kendall round trip over generated specs") {
  sim::RandomStream s(1, "kendall");
  const DistributionCode codes[] = {DistributionCode::M, DistributionCode::E, DistributionCode::G,
                                    DistributionCode::GI};
  const Ranking rules[] = {Ranking::FCFS, Ranking::LCFS, Ranking::PRI};
  for (int i = 0; i < 500; ++i) {
    KendallSpec k;
    k.arrival = codes[s.index(4)];
    k.service = codes[s.index(4)];
    k.servers = static_cast<std::uint32_t>(1 + s.index(20));
    if (s.bernoulli(0.5)) k.capacity = 1 + s.index(1000);
    if (s.bernoulli(0.5)) k.population = 1 + s.index(1000);
    k.ranking = rules[s.index(3)];
    const auto text = format_kendall(k);
    REQUIRE(parse_kendall(text) == k);
    REQUIRE(format_kendall(parse_kendall(text)) == text);
  }
}

TEST_CASE("service queue basics") {
  SUBCASE("idle server starts immediately") {
    ServiceQueue<int> q;
    Customer<int> c;
    c.service_time = 2.0;
    const auto r = q.enqueue(c, 1.0);
    CHECK(r.accepted);
    REQUIRE(r.started);
    CHECK(r.started->completes_at == 3.0);
    const auto done = q.complete(r.started->server, 3.0);
    CHECK(done.departure.delay == 0.0);
    CHECK(done.departure.sojourn == 2.0);
  }
  SUBCASE("full queue rejects") {
    ServiceQueue<int> q(1, 1);
    CHECK(q.enqueue({}, 0.0).accepted);
    CHECK_FALSE(q.enqueue({}, 0.0).accepted);
    CHECK(q.stats().dropped == 1);
    CHECK(q.stats().offered == 2);
    CHECK(q.occupancy_fraction() == 1.0);
  }
  SUBCASE("discipline order") {
    auto served = [](Discipline d) {
      ServiceQueue<int> q(1, std::nullopt, d);
      const int prio[] = {0, 2, 1, 0};
      for (int i = 0; i < 4; ++i) {
        Customer<int> c;
        c.service_time = 1.0;
        c.priority = prio[i];
        c.payload = i;
        q.enqueue(c, 0.0);
      }
      std::vector<int> order;
      for (int t = 1; t <= 4; ++t) order.push_back(q.complete(0, t).departure.customer.payload);
      return order;
    };
    CHECK(served(Discipline::FIFO) == std::vector<int>{0, 1, 2, 3});
    CHECK(served(Discipline::LIFO) == std::vector<int>{0, 3, 2, 1});
    CHECK(served(Discipline::Priority) == std::vector<int>{0, 3, 2, 1});
  }
  SUBCASE("completion on idle server") {
    ServiceQueue<int> q;
    CHECK_THROWS_AS(q.complete(0, 1.0), InvariantViolation);
  }
  SUBCASE("clear empties the system") {
    ServiceQueue<int> q(2);
    for (int i = 0; i < 5; ++i) q.enqueue({}, 0.0);
    CHECK(q.clear(1.0).size() == 5);
    CHECK(q.in_system() == 0);
  }
}

TEST_CASE("steady_state and conservation") {
  CHECK_THROWS_AS(steady_state(QueueStats{}), EmptyObservation);
  SteadyStateEstimates e;
  e.Q = 0.8;
  e.d = 0.4;
  CHECK(check_conservation(e, 2.0).queue == 0.0);
  const auto zero = check_conservation(SteadyStateEstimates{}, 0.0);
  CHECK(zero.queue == 0.0);
  CHECK(zero.system == 0.0);
}

TEST_CASE("mm1 oracle") {
  const auto idle = mm1_oracle(0.0, 4.0);
  CHECK(idle.L == 0.0);
  CHECK(idle.Q == 0.0);
  CHECK(idle.d == 0.0);
  CHECK(idle.w == 0.25);
  const auto half = mm1_oracle(1.0, 2.0);
  CHECK(half.L == doctest::Approx(1.0));
  CHECK(half.w == doctest::Approx(1.0));
  CHECK(half.d == doctest::Approx(0.5));
  CHECK(half.Q == doctest::Approx(0.5));
  CHECK_THROWS_AS(mm1_oracle(1.0, 1.0), UnstableQueue);
  CHECK_THROWS_AS(mm1_oracle(1.0, 0.0), NonPositiveRate);
}

TEST_CASE("simulated M/M/1 converges to the closed form") {
  QueueExperiment ex;
  ex.arrival_rate = 1.0;
  ex.service_rate = 2.0;
  ex.customers = 100000;
  ex.seed = 4;
  const auto run = simulate_queue(ex);
  const auto oracle = mm1_oracle(1.0, 2.0);
  CHECK(rel(run.estimates.L, oracle.L) < 0.03);
  CHECK(rel(run.estimates.w, oracle.w) < 0.03);
  CHECK(rel(run.estimates.d, oracle.d) < 0.05);
  CHECK(rel(run.estimates.Q, oracle.Q) < 0.05);
  CHECK(run.stats.dropped == 0);
  CHECK(run.stats.admitted == run.stats.offered);
  CHECK(run.max_sojourn_identity_error < 1e-9);
  CHECK(std::abs(run.estimates.w - run.estimates.d - run.estimates.mean_service) < 1e-9);
}

TEST_CASE("Little's law holds for every discipline and seed") {
  for (Discipline d : {Discipline::FIFO, Discipline::LIFO, Discipline::Priority}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      QueueExperiment ex;
      ex.arrival_rate = 0.8;
      ex.service_rate = 1.0;
      ex.discipline = d;
      ex.seed = seed;
      const auto run = simulate_queue(ex);
      const auto r = check_conservation(run.estimates, run.estimates.arrival_rate);
      CHECK(r.queue < 0.01);
      CHECK(r.system < 0.01);
      CHECK(run.max_sojourn_identity_error < 1e-9);
    }
  }
}

TEST_CASE("mean delay is invariant under FIFO and LIFO") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    QueueExperiment ex;
    ex.arrival_rate = 0.5;
    ex.service_rate = 1.0;
    ex.seed = seed;
    const auto fifo = simulate_queue(ex);
    ex.discipline = Discipline::LIFO;
    const auto lifo = simulate_queue(ex);
    CHECK(rel(lifo.estimates.d, fifo.estimates.d) < 0.02);
    CHECK(rel(lifo.estimates.L, fifo.estimates.L) < 0.02);
  }
}

TEST_CASE("finite capacity blocks and reports it") {
  QueueExperiment ex;
  ex.arrival_rate = 2.0;
  ex.service_rate = 1.0;
  ex.capacity = 5;
  ex.customers = 20000;
  const auto run = simulate_queue(ex);
  // M/M/1/K blocking: (1 - rho) rho^K / (1 - rho^(K+1)).
  const double rho = 2.0, k = 5.0;
  const double expect = (1 - rho) * std::pow(rho, k) / (1 - std::pow(rho, k + 1));
  CHECK(run.estimates.blocking_probability == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("kendall-driven experiments") {
  const auto ex = experiment_from_kendall(parse_kendall("[M/M/2]:{10/inf/LCFS}"), 1.0, 2.0);
  CHECK(ex.servers == 2);
  CHECK(ex.capacity == 10u);
  CHECK(ex.discipline == Discipline::LIFO);
  CHECK_THROWS(experiment_from_kendall(parse_kendall("[M/M/1]:{inf/5/FCFS}"), 1.0, 2.0));
  auto erlang = experiment_from_kendall(parse_kendall("[E/M/1]:{inf/inf/FCFS}"), 1.0, 2.0);
  erlang.customers = 10;
  CHECK_THROWS_AS(simulate_queue(erlang), UnsupportedDistribution);
}
