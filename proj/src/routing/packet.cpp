#include "manet/routing/packet.hpp"

#include <algorithm>
#include <unordered_set>

namespace manet::routing {

std::string_view to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::RREQ: return "RREQ";
    case PacketKind::RREP: return "RREP";
    case PacketKind::RERR: return "RERR";
    case PacketKind::DATA: return "DATA";
    case PacketKind::ACK: return "ACK";
  }
  return "?";
}

bool loop_free(const SourceRoute& route) {
  std::unordered_set<NodeId> seen;
  seen.reserve(route.size());
  for (NodeId n : route) {
    if (!seen.insert(n).second) return false;
  }
  return true;
}

std::size_t position_in(const SourceRoute& route, NodeId node) {
  return static_cast<std::size_t>(std::find(route.begin(), route.end(), node) - route.begin());
}

SourceRoute splice_routes(const SourceRoute& prefix, const SourceRoute& suffix) {
  SourceRoute out;
  out.reserve(prefix.size() + suffix.size());
  auto append = [&out](NodeId n) {
    const auto pos = std::find(out.begin(), out.end(), n);
    if (pos != out.end()) {
      out.erase(pos + 1, out.end());
    } else {
      out.push_back(n);
    }
  };
  for (NodeId n : prefix) append(n);
  for (NodeId n : suffix) append(n);
  return out;
}

bool contains_link(const SourceRoute& route, NodeId a, NodeId b) {
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    if ((route[i] == a && route[i + 1] == b) || (route[i] == b && route[i + 1] == a)) {
      return true;
    }
  }
  return false;
}

}  // namespace manet::routing
