#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "manet/routing/packet.hpp"
#include "manet/routing/route_cache.hpp"

namespace manet::routing {

struct DsrParams {
  std::uint32_t max_ttl = 16;
  bool cache_reply = true;
  bool promiscuous = true;
  std::size_t cache_per_destination = 4;
  Time seen_expiry = 30.0;
  std::uint32_t retransmit_limit = 3;
  std::size_t send_buffer = 64;
  Time send_buffer_timeout = 30.0;
  Time discovery_timeout = 0.5;       // first attempt; doubles per retry
  Time max_discovery_timeout = 8.0;
  std::uint32_t replies_per_request = 1;  // RREPs a destination sends per (source, id)
};

/// (source, request-id) pairs seen recently, with a per-pair counter.
class SeenRequests {
 public:
  explicit SeenRequests(Time expiry = 30.0) : expiry_(expiry) {}

  /// Number of earlier sightings of (source, id) still within the expiry.
  std::uint32_t count(NodeId source, std::uint32_t id, Time now) const;

  /// Records one more sighting and returns the updated count.
  std::uint32_t record(NodeId source, std::uint32_t id, Time now);

  /// Drops entries older than the expiry.
  void expire(Time now);

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    Time first_seen = 0.0;
    std::uint32_t count = 0;
  };
  Time expiry_;
  std::map<std::pair<NodeId, std::uint32_t>, Entry> entries_;
};

enum class RreqDecision : std::uint8_t { Drop, Reply, Forward };
enum class RreqDropReason : std::uint8_t { None, Duplicate, Loop, TtlExpired };

struct RreqOutcome {
  RreqDecision decision = RreqDecision::Drop;
  RreqDropReason reason = RreqDropReason::None;
  /// Complete source .. destination route for a Reply.
  SourceRoute reply_route;
};

/// Route-request processing at `self`:
///   destination -> Reply along traversed + self (up to replies_per_request
///   distinct copies); duplicate, looping, or ttl = 0 -> Drop; cached route
///   to the destination with cache_reply on -> Reply with the spliced
///   route, unless splicing cuts `self` out; otherwise Forward. Records the sighting in `seen`.
RreqOutcome handle_rreq(NodeId self, const Packet& rreq, SeenRequests& seen,
                        const RouteCache& cache, const DsrParams& params, Time now);

/// The copy `self` rebroadcasts: self appended, ttl - 1, own cost appended.
Packet forwarded_rreq(const Packet& rreq, NodeId self, double self_cost = 0.0);

enum class DataDecision : std::uint8_t { Deliver, Relay };

struct DataOutcome {
  DataDecision decision = DataDecision::Deliver;
  NodeId next_hop = kNoNode;
};

/// Next step for a source-routed packet held by `self`. Throws
/// InvariantViolation when `self` is not on the route.
DataOutcome forward_data(NodeId self, const Packet& packet);

/// Learns routes from a packet overheard while `transmitter` sent it.
///   DATA / RREP: on-route nodes cache their forward suffix; off-route
///   neighbors cache [self, transmitter .. destination].
///   RREQ: [self, transmitter .. originator] along reversed traversed.
/// Returns the number of new cache entries; 0 when `enabled` is false.
std::size_t promiscuous_learn(RouteCache& cache, const Packet& packet, NodeId transmitter,
                              bool enabled, Time now);

/// Picks one of several candidate routes; returns an index.
using RouteChooser = std::function<std::size_t(std::span<const SourceRoute>)>;

/// DSR default: fewest hops, then oldest (candidates arrive in that order).
std::size_t choose_first(std::span<const SourceRoute> candidates);

struct PendingData {
  Packet packet;
  Time buffered_at = 0.0;
};

/// Per-node DSR protocol state.
class DsrAgent {
 public:
  DsrAgent(NodeId self, const DsrParams& params);

  NodeId self() const noexcept { return self_; }
  const DsrParams& params() const noexcept { return params_; }
  RouteCache& cache() noexcept { return cache_; }
  const RouteCache& cache() const noexcept { return cache_; }
  SeenRequests& seen() noexcept { return seen_; }

  enum class OriginateKind : std::uint8_t { Send, StartDiscovery, Buffered, DeliverLocal, Dropped };

  struct OriginateResult {
    OriginateKind kind = OriginateKind::Send;
    Packet packet;  // DATA with route set (Send / DeliverLocal) or the dropped packet
    Packet rreq;    // StartDiscovery only
  };

  /// Route lookup for a new DATA packet. With a cached route the packet is
  /// returned ready to send. Otherwise it is buffered; a fresh RREQ is
  /// issued unless a discovery for that destination is already running.
  /// A full send buffer yields Dropped.
  OriginateResult originate(Packet data, Time now, const RouteChooser& choose = choose_first);

  /// Fresh RREQ for `destination` with the next request id.
  Packet new_rreq(NodeId destination);

  std::uint32_t last_request_id() const noexcept { return next_request_id_ - 1; }

  bool discovering(NodeId destination) const { return discovery_.contains(destination); }
  /// Marks the start of a discovery round; returns its timeout.
  Time begin_discovery(NodeId destination);
  void end_discovery(NodeId destination) { discovery_.erase(destination); }
  std::uint32_t discovery_attempts(NodeId destination) const;

  bool has_pending(NodeId destination) const;
  std::size_t pending_count() const noexcept { return pending_total_; }

  /// Buffered packets for `destination` that can now be sent, each with
  /// its chosen route. Leaves them buffered when no route is cached.
  std::vector<Packet> release_pending(NodeId destination, const RouteChooser& choose = choose_first);

  /// Puts a packet back into the send buffer, e.g. after a first-hop
  /// failure. Returns false (packet dropped) when the buffer is full.
  bool rebuffer(Packet data, Time now);

  /// Removes and returns packets buffered longer than the timeout.
  std::vector<Packet> expire_pending(Time now);

  /// Removes and returns every buffered packet (node death / end of run).
  std::vector<Packet> drain_pending();

  std::vector<NodeId> pending_destinations() const;

  /// Purges cached routes using the RERR's broken link. Returns the count.
  std::size_t handle_rerr(const Packet& rerr);

 private:
  struct Discovery {
    std::uint32_t attempts = 0;
  };

  NodeId self_;
  DsrParams params_;
  RouteCache cache_;
  SeenRequests seen_;
  std::uint32_t next_request_id_ = 1;
  std::map<NodeId, std::deque<PendingData>> pending_;
  std::size_t pending_total_ = 0;
  std::map<NodeId, Discovery> discovery_;
};

}  // namespace manet::routing
