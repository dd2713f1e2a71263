#pragma once

#include <cstdint>

#include "manet/types.hpp"

namespace manet::queueing {

/// Accumulators for one queue over the current observation window.
struct QueueStats {
  std::uint64_t served = 0;       // n
  double sum_delay = 0.0;         // sum of D_i (time in queue)
  double sum_sojourn = 0.0;       // sum of W_i = D_i + S_i
  double sum_service = 0.0;       // sum of S_i
  std::uint64_t delayed = 0;      // customers with D_i > 0
  double area_queue = 0.0;        // integral of Q(t)
  double area_system = 0.0;       // integral of L(t)
  double all_idle_time = 0.0;     // time with L(t) == 0
  std::uint64_t offered = 0;      // arrivals presented to the queue
  std::uint64_t admitted = 0;
  std::uint64_t dropped = 0;      // rejected at full capacity
  Time window_start = 0.0;
  Time last_update = 0.0;

  Time horizon() const noexcept { return last_update - window_start; }
};

/// Finite-horizon estimates of the steady-state measures.
struct SteadyStateEstimates {
  double d = 0.0;  // average delay in queue
  double w = 0.0;  // average time in system
  double Q = 0.0;  // time-average number in queue
  double L = 0.0;  // time-average number in system
  double blocking_probability = 0.0;  // dropped / offered
  double arrival_rate = 0.0;          // admitted / horizon
  double mean_service = 0.0;          // sum S_i / n
  double delay_probability = 0.0;     // fraction with D_i > 0
  double idle_fraction = 0.0;         // time fraction with L(t) == 0
};

/// d = sum D_i / n, w = sum W_i / n, Q = int Q dt / T, L = int L dt / T.
/// Throws EmptyObservation when n == 0 or T == 0.
SteadyStateEstimates steady_state(const QueueStats& stats);

/// Relative residuals of the conservation equations Q = lambda d and
/// L = lambda w, each divided by max(value, 1e-12).
struct ConservationResiduals {
  double queue = 0.0;
  double system = 0.0;
};

ConservationResiduals check_conservation(const SteadyStateEstimates& est,
                                         double arrival_rate);

/// Closed-form M/M/1 measures. Requires 0 <= lambda < mu; throws
/// UnstableQueue when lambda >= mu and NonPositiveRate when mu <= 0 or
/// lambda < 0.
SteadyStateEstimates mm1_oracle(double lambda, double mu);

}  // namespace manet::queueing
