#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace manet {

/// Simulated time in seconds.
using Time = double;

using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr Time kForever = std::numeric_limits<Time>::infinity();

/// Ordered hop list; element 0 is the originator.
using SourceRoute = std::vector<NodeId>;

}  // namespace manet
