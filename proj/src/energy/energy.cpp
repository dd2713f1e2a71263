#include "manet/energy/energy.hpp"

#include <algorithm>
#include <stdexcept>

namespace manet::energy {

double EnergyModel::power(Activity activity) const noexcept {
  switch (activity) {
    case Activity::Tx: return p_tx;
    case Activity::Rx: return p_rx;
    case Activity::Idle: return p_idle;
    case Activity::Sleep: return p_sleep;
  }
  return 0.0;
}

std::vector<std::string> EnergyModel::validate() const {
  std::vector<std::string> errors;
  if (!(p_tx >= p_rx)) errors.emplace_back("p_tx must be >= p_rx");
  if (!(p_rx > p_idle)) errors.emplace_back("p_rx must be > p_idle");
  if (!(p_idle > p_sleep)) errors.emplace_back("p_idle must be > p_sleep");
  if (!(p_sleep >= 0.0)) errors.emplace_back("p_sleep must be >= 0");
  if (!(initial > 0.0)) errors.emplace_back("initial energy must be positive");
  if (!(bit_time > 0.0)) errors.emplace_back("bit_time must be positive");
  return errors;
}

std::vector<std::string> EnergyModel::warnings() const {
  std::vector<std::string> out;
  if (p_rx > 0.0 && p_idle / p_rx < 0.7) {
    out.emplace_back("p_idle/p_rx below 0.7: idle listening is usually close to receive power");
  }
  return out;
}

NodeEnergy charge(NodeEnergy node, Activity activity, Time duration,
                  const EnergyModel& model, Time start) {
  if (duration < 0.0) throw std::invalid_argument("charge duration must be non-negative");
  if (!node.alive() || duration == 0.0) return node;
  const double power = model.power(activity);
  const double cost = power * duration;
  if (cost < node.residual) {
    node.residual -= cost;
    node.consumed += cost;
    return node;
  }
  node.death_time = start + (power > 0.0 ? node.residual / power : 0.0);
  node.consumed += node.residual;
  node.residual = 0.0;
  node.state = PowerState::Dead;
  return node;
}

std::optional<Time> network_lifetime(std::span<const NodeEnergy> nodes) {
  std::optional<Time> first;
  for (const auto& n : nodes) {
    if (n.death_time && (!first || *n.death_time < *first)) first = n.death_time;
  }
  return first;
}

}  // namespace manet::energy
