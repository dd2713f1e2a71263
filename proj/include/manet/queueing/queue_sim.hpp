#pragma once

#include <cstdint>
#include <optional>

#include "manet/queueing/kendall.hpp"
#include "manet/queueing/measures.hpp"
#include "manet/queueing/service_queue.hpp"

namespace manet::queueing {

/// A single-station queue experiment driven by the event engine.
struct QueueExperiment {
  double arrival_rate = 1.0;  // lambda
  double service_rate = 2.0;  // mu
  std::uint32_t servers = 1;
  std::optional<std::size_t> capacity;
  Discipline discipline = Discipline::FIFO;
  DistributionCode arrival_code = DistributionCode::M;
  DistributionCode service_code = DistributionCode::M;
  std::uint64_t customers = 100000;  // served customers counted after warm-up
  double warmup_fraction = 0.05;     // of `customers`, discarded before counting
  std::uint64_t seed = 1;
};

/// Builds an experiment from Kendall text plus rates. The calling
/// population must be infinite.
QueueExperiment experiment_from_kendall(const KendallSpec& spec, double lambda, double mu);

struct QueueRun {
  QueueStats stats;
  SteadyStateEstimates estimates;
  /// max over customers of |(departure - arrival) - (D_i + S_i)|
  double max_sojourn_identity_error = 0.0;
  std::uint64_t events = 0;
};

/// Runs until `customers` post-warm-up departures. Only exponential
/// (code M) arrivals and service are executable; other codes throw
/// UnsupportedDistribution. Priority keys are drawn uniformly from {0,1,2}.
QueueRun simulate_queue(const QueueExperiment& experiment);

}  // namespace manet::queueing
