#include "manet/queueing/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "manet/error.hpp"

namespace manet::queueing {

SteadyStateEstimates steady_state(const QueueStats& stats) {
  const Time horizon = stats.horizon();
  if (stats.served == 0 || !(horizon > 0.0)) {
    throw EmptyObservation("steady_state needs at least one served customer and T > 0");
  }
  const auto n = static_cast<double>(stats.served);
  SteadyStateEstimates est;
  est.d = stats.sum_delay / n;
  est.w = stats.sum_sojourn / n;
  est.Q = stats.area_queue / horizon;
  est.L = stats.area_system / horizon;
  est.mean_service = stats.sum_service / n;
  est.delay_probability = static_cast<double>(stats.delayed) / n;
  est.idle_fraction = stats.all_idle_time / horizon;
  est.arrival_rate = static_cast<double>(stats.admitted) / horizon;
  est.blocking_probability =
      stats.offered == 0 ? 0.0
                         : static_cast<double>(stats.dropped) / static_cast<double>(stats.offered);
  return est;
}

ConservationResiduals check_conservation(const SteadyStateEstimates& est,
                                         double arrival_rate) {
  constexpr double kEps = 1e-12;
  return ConservationResiduals{
      std::abs(est.Q - arrival_rate * est.d) / std::max(est.Q, kEps),
      std::abs(est.L - arrival_rate * est.w) / std::max(est.L, kEps),
  };
}

SteadyStateEstimates mm1_oracle(double lambda, double mu) {
  if (!(mu > 0.0) || lambda < 0.0) {
    throw NonPositiveRate("mm1_oracle needs mu > 0 and lambda >= 0");
  }
  if (lambda >= mu) {
    throw UnstableQueue("M/M/1 is unstable for lambda=" + std::to_string(lambda) +
                        " >= mu=" + std::to_string(mu));
  }
  const double rho = lambda / mu;
  SteadyStateEstimates est;
  est.L = rho / (1.0 - rho);
  est.w = 1.0 / (mu - lambda);
  est.d = est.w - 1.0 / mu;
  est.Q = lambda * est.d;
  est.arrival_rate = lambda;
  est.mean_service = 1.0 / mu;
  est.delay_probability = rho;
  est.idle_fraction = 1.0 - rho;
  return est;
}

}  // namespace manet::queueing
