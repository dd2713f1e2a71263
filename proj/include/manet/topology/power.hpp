#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "manet/topology/links.hpp"

namespace manet::topology {

/// Greedy sleep planning over the alive nodes of `links`.
///
/// Candidates are visited in ascending residual energy (ties: lower id). A
/// candidate is put to sleep when
///   - it is not `protected_nodes` (live traffic endpoints),
///   - it is not terminal (has at least two alive neighbors),
///   - none of its neighbors already sleeps, and
///   - the awake survivors stay connected without it.
/// Throws NotConnected when the alive graph is not connected to begin with.
/// Returns the sleeping node ids in ascending order.
std::vector<NodeId> plan_power_states(const LinkSet& links,
                                      std::span<const double> energies,
                                      std::span<const std::uint8_t> protected_nodes = {},
                                      std::span<const std::uint8_t> alive = {});

}  // namespace manet::topology
