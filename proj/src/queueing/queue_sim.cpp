#include "manet/queueing/queue_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "manet/error.hpp"
#include "manet/sim/random.hpp"
#include "manet/sim/simulator.hpp"

namespace manet::queueing {

QueueExperiment experiment_from_kendall(const KendallSpec& spec, double lambda, double mu) {
  if (spec.population) {
    throw UnsupportedDistribution("finite calling populations are not simulated");
  }
  QueueExperiment exp;
  exp.arrival_rate = lambda;
  exp.service_rate = mu;
  exp.servers = spec.servers;
  exp.capacity = spec.capacity ? std::optional<std::size_t>(*spec.capacity) : std::nullopt;
  exp.arrival_code = spec.arrival;
  exp.service_code = spec.service;
  switch (spec.ranking) {
    case Ranking::FCFS: exp.discipline = Discipline::FIFO; break;
    case Ranking::LCFS: exp.discipline = Discipline::LIFO; break;
    case Ranking::PRI: exp.discipline = Discipline::Priority; break;
  }
  return exp;
}

QueueRun simulate_queue(const QueueExperiment& experiment) {
  if (experiment.arrival_code != DistributionCode::M ||
      experiment.service_code != DistributionCode::M) {
    throw UnsupportedDistribution("only exponential (M) arrivals and service are executable");
  }
  if (!(experiment.arrival_rate > 0.0) || !(experiment.service_rate > 0.0)) {
    throw NonPositiveRate("queue experiment rates must be positive");
  }

  sim::Simulator engine;
  sim::RandomStream arrivals(experiment.seed, "arrivals");
  sim::RandomStream service(experiment.seed, "service");
  sim::RandomStream priority(experiment.seed, "priority");
  ServiceQueue<int> queue(experiment.servers, experiment.capacity, experiment.discipline);

  const auto warmup = static_cast<std::uint64_t>(
      std::llround(experiment.warmup_fraction * static_cast<double>(experiment.customers)));
  std::uint64_t departures = 0;
  bool measuring = warmup == 0;
  double max_identity_error = 0.0;

  std::function<void(std::size_t)> on_complete;
  auto start_service = [&](const std::optional<ServiceStart>& started) {
    if (!started) return;
    const std::size_t server = started->server;
    engine.schedule(started->completes_at, sim::EventKind::ServiceComplete,
                    [&, server] { on_complete(server); });
  };

  on_complete = [&](std::size_t server) {
    auto result = queue.complete(server, engine.now());
    const auto& dep = result.departure;
    const double measured = engine.now() - dep.customer.arrival;
    max_identity_error = std::max(
        max_identity_error, std::abs(measured - (dep.delay + dep.customer.service_time)));
    start_service(result.started);
    ++departures;
    if (!measuring && departures >= warmup) {
      queue.reset_statistics(engine.now());
      measuring = true;
      return;
    }
    if (measuring && queue.stats().served >= experiment.customers) engine.stop();
  };

  std::function<void()> on_arrival = [&] {
    Customer<int> customer;
    customer.service_time = service.exponential(experiment.service_rate);
    if (experiment.discipline == Discipline::Priority) {
      customer.priority = static_cast<int>(priority.index(3));
    }
    start_service(queue.enqueue(std::move(customer), engine.now()).started);
    engine.schedule_in(arrivals.exponential(experiment.arrival_rate),
                       sim::EventKind::PacketArrival, on_arrival);
  };

  if (warmup == 0) queue.reset_statistics(0.0);
  engine.schedule(arrivals.exponential(experiment.arrival_rate), sim::EventKind::PacketArrival,
                  on_arrival);
  engine.run_until(kForever);
  queue.observe(engine.now());

  QueueRun run;
  run.stats = queue.stats();
  run.estimates = steady_state(run.stats);
  run.max_sojourn_identity_error = max_identity_error;
  run.events = engine.dispatched();
  return run;
}

}  // namespace manet::queueing
