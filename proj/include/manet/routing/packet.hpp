#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "manet/types.hpp"

namespace manet::routing {

enum class PacketKind : std::uint8_t { RREQ, RREP, RERR, DATA, ACK };

/// Why a RERR was raised. Congestion marks a full relay queue.
enum class ErrorReason : std::uint8_t { LinkBroken, Congestion };

std::string_view to_string(PacketKind kind);

inline bool is_control(PacketKind kind) noexcept { return kind != PacketKind::DATA; }

/// Default sizes.
inline constexpr std::uint64_t kDataBits = 512 * 8;
inline constexpr std::uint64_t kControlBits = 64 * 8;

/// Tagged packet. Only the fields meaningful for `kind` are populated:
///   RREQ: request_id, ttl, traversed (+ hop_costs for cost-aware variants)
///   RREP: route (source .. destination), hop_costs
///   RERR: route (reporter .. data source), broken_link, reason
///   DATA: route, payload_bits, created
struct Packet {
  PacketKind kind = PacketKind::DATA;
  std::uint64_t uid = 0;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  std::uint32_t request_id = 0;
  std::uint32_t ttl = 0;
  SourceRoute route;
  SourceRoute traversed;
  std::vector<double> hop_costs;  // parallel to traversed / route
  std::pair<NodeId, NodeId> broken_link{kNoNode, kNoNode};
  ErrorReason reason = ErrorReason::LinkBroken;
  std::uint64_t payload_bits = 0;
  Time created = 0.0;
  bool backbone_only = false;  // clustered discovery scope
};

/// True when `route` has no repeated node id.
bool loop_free(const SourceRoute& route);

/// Index of `node` in `route`, or route.size() when absent.
std::size_t position_in(const SourceRoute& route, NodeId node);

/// Joins `prefix` (ending at the node holding `suffix.front()`) with
/// `suffix`, cutting out any loop the join would create.
SourceRoute splice_routes(const SourceRoute& prefix, const SourceRoute& suffix);

/// True when a -> b or b -> a appear consecutively in `route`.
bool contains_link(const SourceRoute& route, NodeId a, NodeId b);

}  // namespace manet::routing
