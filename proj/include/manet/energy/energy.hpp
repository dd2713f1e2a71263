#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "manet/types.hpp"

namespace manet::energy {

enum class Activity : std::uint8_t { Tx, Rx, Idle, Sleep };

/// Radio power profile. Defaults are WaveLAN-class figures.
struct EnergyModel {
  double p_tx = 1.4;     // W
  double p_rx = 1.0;
  double p_idle = 0.83;
  double p_sleep = 0.13;
  double initial = 250.0;       // J
  double bit_time = 1.0 / 2e6;  // s/bit (2 Mbit/s)

  double power(Activity activity) const noexcept;

  /// Airtime of a packet of `bits` bits.
  double airtime(std::uint64_t bits) const noexcept { return static_cast<double>(bits) * bit_time; }

  /// Empty when consistent. Hard errors (ordering violated) are returned
  /// by validate(); soft ones (idle/rx ratio below 0.7) by warnings().
  std::vector<std::string> validate() const;
  std::vector<std::string> warnings() const;
};

enum class PowerState : std::uint8_t { On, Sleep, Dead };

struct NodeEnergy {
  double residual = 0.0;
  PowerState state = PowerState::On;
  std::optional<Time> death_time;
  double consumed = 0.0;  // sum of every applied charge

  static NodeEnergy full(const EnergyModel& model) {
    return NodeEnergy{model.initial, PowerState::On, std::nullopt, 0.0};
  }
  bool alive() const noexcept { return state != PowerState::Dead; }
};

/// Deducts power(activity) * duration for the interval starting at
/// `start`, clamping at zero. The first crossing records the exact death
/// time and makes the node Dead; dead nodes ignore further charges.
NodeEnergy charge(NodeEnergy node, Activity activity, Time duration,
                  const EnergyModel& model, Time start);

/// Earliest death time across nodes (first-node-death lifetime), or empty
/// when no node died.
std::optional<Time> network_lifetime(std::span<const NodeEnergy> nodes);

}  // namespace manet::energy
