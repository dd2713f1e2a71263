#include "manet/routing/dsr.hpp"

#include <algorithm>
#include <cmath>

#include "manet/error.hpp"

namespace manet::routing {

std::uint32_t SeenRequests::count(NodeId source, std::uint32_t id, Time now) const {
  auto it = entries_.find({source, id});
  if (it == entries_.end() || now - it->second.first_seen > expiry_) return 0;
  return it->second.count;
}

std::uint32_t SeenRequests::record(NodeId source, std::uint32_t id, Time now) {
  auto& entry = entries_[{source, id}];
  if (entry.count == 0 || now - entry.first_seen > expiry_) {
    entry = Entry{now, 0};
  }
  return ++entry.count;
}

void SeenRequests::expire(Time now) {
  std::erase_if(entries_, [&](const auto& kv) { return now - kv.second.first_seen > expiry_; });
}

RreqOutcome handle_rreq(NodeId self, const Packet& rreq, SeenRequests& seen,
                        const RouteCache& cache, const DsrParams& params, Time now) {
  RreqOutcome out;
  if (position_in(rreq.traversed, self) < rreq.traversed.size()) {
    out.reason = RreqDropReason::Loop;
    return out;
  }
  const std::uint32_t earlier = seen.count(rreq.source, rreq.request_id, now);
  if (self == rreq.destination) {
    if (earlier >= params.replies_per_request) {
      seen.record(rreq.source, rreq.request_id, now);
      out.reason = RreqDropReason::Duplicate;
      return out;
    }
    seen.record(rreq.source, rreq.request_id, now);
    out.decision = RreqDecision::Reply;
    out.reply_route = rreq.traversed;
    out.reply_route.push_back(self);
    return out;
  }
  seen.record(rreq.source, rreq.request_id, now);
  if (earlier > 0) {
    out.reason = RreqDropReason::Duplicate;
    return out;
  }
  if (params.cache_reply) {
    if (auto cached = cache.best(rreq.destination)) {
      SourceRoute full = splice_routes(rreq.traversed, *cached);
      // A cached route that revisits the traversed prefix would be cut
      // back past self, leaving no reverse path for the reply.
      if (full.size() >= 2 && full.front() == rreq.source && full.back() == rreq.destination &&
          position_in(full, self) < full.size()) {
        out.decision = RreqDecision::Reply;
        out.reply_route = std::move(full);
        return out;
      }
    }
  }
  if (rreq.ttl == 0) {
    out.reason = RreqDropReason::TtlExpired;
    return out;
  }
  out.decision = RreqDecision::Forward;
  return out;
}

Packet forwarded_rreq(const Packet& rreq, NodeId self, double self_cost) {
  Packet copy = rreq;
  copy.traversed.push_back(self);
  copy.hop_costs.resize(rreq.traversed.size(), 0.0);
  copy.hop_costs.push_back(self_cost);
  copy.ttl = rreq.ttl - 1;
  return copy;
}

DataOutcome forward_data(NodeId self, const Packet& packet) {
  const std::size_t pos = position_in(packet.route, self);
  if (pos >= packet.route.size()) {
    throw InvariantViolation("node " + std::to_string(self) + " is not on the source route");
  }
  if (pos + 1 == packet.route.size()) return DataOutcome{DataDecision::Deliver, kNoNode};
  return DataOutcome{DataDecision::Relay, packet.route[pos + 1]};
}

std::size_t promiscuous_learn(RouteCache& cache, const Packet& packet, NodeId transmitter,
                              bool enabled, Time now) {
  if (!enabled) return 0;
  const NodeId self = cache.owner();
  std::size_t added = 0;
  switch (packet.kind) {
    case PacketKind::DATA:
    case PacketKind::RREP: {
      const auto& r = packet.route;
      const std::size_t mine = position_in(r, self);
      if (mine < r.size()) {
        if (mine + 1 < r.size()) {
          added += cache.add(SourceRoute(r.begin() + static_cast<std::ptrdiff_t>(mine), r.end()), now);
        }
        break;
      }
      const std::size_t from = position_in(r, transmitter);
      if (from >= r.size()) break;
      SourceRoute learned{self};
      learned.insert(learned.end(), r.begin() + static_cast<std::ptrdiff_t>(from), r.end());
      added += cache.add(learned, now);
      break;
    }
    case PacketKind::RREQ: {
      const auto& t = packet.traversed;
      if (position_in(t, self) < t.size()) break;
      const std::size_t from = position_in(t, transmitter);
      if (from >= t.size()) break;
      SourceRoute learned{self};
      for (std::size_t i = from + 1; i-- > 0;) learned.push_back(t[i]);
      added += cache.add(learned, now);
      break;
    }
    case PacketKind::RERR:
    case PacketKind::ACK:
      break;
  }
  return added;
}

std::size_t choose_first(std::span<const SourceRoute> /*candidates*/) { return 0; }

DsrAgent::DsrAgent(NodeId self, const DsrParams& params)
    : self_(self),
      params_(params),
      cache_(self, params.cache_per_destination),
      seen_(params.seen_expiry) {}

Packet DsrAgent::new_rreq(NodeId destination) {
  Packet rreq;
  rreq.kind = PacketKind::RREQ;
  rreq.source = self_;
  rreq.destination = destination;
  rreq.request_id = next_request_id_++;
  rreq.ttl = params_.max_ttl;
  rreq.traversed = {self_};
  rreq.hop_costs = {0.0};
  rreq.payload_bits = kControlBits;
  return rreq;
}

Time DsrAgent::begin_discovery(NodeId destination) {
  auto& d = discovery_[destination];
  ++d.attempts;
  const double scale = std::ldexp(1.0, static_cast<int>(std::min<std::uint32_t>(d.attempts - 1, 30)));
  return std::min(params_.discovery_timeout * scale, params_.max_discovery_timeout);
}

std::uint32_t DsrAgent::discovery_attempts(NodeId destination) const {
  auto it = discovery_.find(destination);
  return it == discovery_.end() ? 0 : it->second.attempts;
}

DsrAgent::OriginateResult DsrAgent::originate(Packet data, Time now, const RouteChooser& choose) {
  OriginateResult result;
  if (data.destination == self_) {
    data.route = {self_};
    result.kind = OriginateKind::DeliverLocal;
    result.packet = std::move(data);
    return result;
  }
  const auto cached = cache_.find_all(data.destination);
  if (!cached.empty()) {
    std::vector<SourceRoute> routes;
    routes.reserve(cached.size());
    for (const auto& c : cached) routes.push_back(c.route);
    data.route = routes[choose(routes)];
    result.kind = OriginateKind::Send;
    result.packet = std::move(data);
    return result;
  }
  if (pending_total_ >= params_.send_buffer) {
    result.kind = OriginateKind::Dropped;
    result.packet = std::move(data);
    return result;
  }
  const NodeId destination = data.destination;
  pending_[destination].push_back(PendingData{std::move(data), now});
  ++pending_total_;
  if (discovering(destination)) {
    result.kind = OriginateKind::Buffered;
    return result;
  }
  result.kind = OriginateKind::StartDiscovery;
  result.rreq = new_rreq(destination);
  return result;
}

bool DsrAgent::has_pending(NodeId destination) const {
  auto it = pending_.find(destination);
  return it != pending_.end() && !it->second.empty();
}

std::vector<Packet> DsrAgent::release_pending(NodeId destination, const RouteChooser& choose) {
  std::vector<Packet> out;
  auto it = pending_.find(destination);
  if (it == pending_.end()) return out;
  const auto cached = cache_.find_all(destination);
  if (cached.empty()) return out;
  std::vector<SourceRoute> routes;
  for (const auto& c : cached) routes.push_back(c.route);
  for (auto& p : it->second) {
    p.packet.route = routes[choose(routes)];
    out.push_back(std::move(p.packet));
  }
  pending_total_ -= it->second.size();
  pending_.erase(it);
  return out;
}

bool DsrAgent::rebuffer(Packet data, Time now) {
  if (pending_total_ >= params_.send_buffer) return false;
  const NodeId destination = data.destination;
  data.route.clear();
  pending_[destination].push_back(PendingData{std::move(data), now});
  ++pending_total_;
  return true;
}

std::vector<Packet> DsrAgent::expire_pending(Time now) {
  std::vector<Packet> out;
  for (auto it = pending_.begin(); it != pending_.end();) {
    auto& q = it->second;
    while (!q.empty() && now - q.front().buffered_at >= params_.send_buffer_timeout) {
      out.push_back(std::move(q.front().packet));
      q.pop_front();
      --pending_total_;
    }
    it = q.empty() ? pending_.erase(it) : std::next(it);
  }
  return out;
}

std::vector<Packet> DsrAgent::drain_pending() {
  std::vector<Packet> out;
  for (auto& [dest, q] : pending_) {
    for (auto& p : q) out.push_back(std::move(p.packet));
  }
  pending_.clear();
  pending_total_ = 0;
  return out;
}

std::vector<NodeId> DsrAgent::pending_destinations() const {
  std::vector<NodeId> out;
  for (const auto& [dest, q] : pending_) {
    if (!q.empty()) out.push_back(dest);
  }
  return out;
}

std::size_t DsrAgent::handle_rerr(const Packet& rerr) {
  return cache_.purge_link(rerr.broken_link.first, rerr.broken_link.second);
}

}  // namespace manet::routing
