#include "manet/experiment/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_set>

#include "manet/error.hpp"
#include "manet/queueing/service_queue.hpp"
#include "manet/routing/dsr.hpp"
#include "manet/routing/nfpqr.hpp"
#include "manet/sim/random.hpp"
#include "manet/sim/simulator.hpp"
#include "manet/topology/mobility.hpp"
#include "manet/topology/placement.hpp"
#include "manet/topology/power.hpp"

namespace manet::experiment {

using metrics::TraceKind;
using metrics::TraceRecord;
using routing::Packet;
using routing::PacketKind;

namespace {

std::string stream_name(std::string_view prefix, std::uint64_t index) {
  return std::string(prefix) + "/" + std::to_string(index);
}

}  // namespace

World build_world(const ScenarioConfig& config) {
  validate(config);
  World world;
  const std::size_t n = config.nodes;

  if (config.placement_file) {
    world.positions = topology::load_placement(*config.placement_file, config.area);
    if (world.positions.size() != n) {
      throw InvalidValue("placement.file", "placement lists " + std::to_string(world.positions.size()) +
                                               " nodes, config has " + std::to_string(n));
    }
    world.initial_links = topology::rebuild_links(world.positions, config.range, {}, topology::Backend::Serial);
  } else {
    sim::RandomStream placement(config.seed, "placement");
    constexpr int kAttempts = 1000;
    for (int attempt = 0;; ++attempt) {
      world.positions = topology::random_placement(n, config.area, placement);
      world.initial_links = topology::rebuild_links(world.positions, config.range, {}, topology::Backend::Serial);
      if (!config.require_connected || topology::is_connected(world.initial_links)) break;
      if (attempt + 1 == kAttempts) {
        throw NotConnected("no connected placement found in " + std::to_string(kAttempts) + " draws");
      }
    }
  }

  world.behavior.assign(n, Behavior::Cooperative);
  {
    sim::RandomStream pick(config.seed, "behavior");
    std::vector<NodeId> order(n);
    for (NodeId i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[pick.index(i)]);
    const auto selfish = static_cast<std::size_t>(std::llround(config.behavior.selfish_fraction * static_cast<double>(n)));
    const auto faulty = static_cast<std::size_t>(std::llround(config.behavior.faulty_fraction * static_cast<double>(n)));
    for (std::size_t i = 0; i < selfish && i < n; ++i) world.behavior[order[i]] = Behavior::Selfish;
    for (std::size_t i = selfish; i < selfish + faulty && i < n; ++i) world.behavior[order[i]] = Behavior::Faulty;
  }

  if (!config.traffic.flows.empty()) {
    world.flows = config.traffic.flows;
    return world;
  }
  sim::RandomStream pairs(config.seed, "traffic.pairs");
  std::set<std::pair<NodeId, NodeId>> used;
  std::size_t guard = 0;
  while (world.flows.size() < config.traffic.pairs && n >= 2) {
    const auto s = static_cast<NodeId>(pairs.index(n));
    const auto d = static_cast<NodeId>(pairs.index(n));
    if (s == d) continue;
    if (!used.insert({s, d}).second && ++guard < 10000) continue;
    world.flows.push_back(Flow{s, d, 0.0, config.traffic.packet_bits});
  }

  double rate = 0.0;
  if (config.traffic.rate) {
    rate = *config.traffic.rate;
  } else {
    // Offered load at the busiest node, routing every flow on a shortest
    // path of the initial topology: each node on the path but the
    // destination serves the flow once.
    std::vector<std::uint32_t> load(n, 0);
    for (const auto& f : world.flows) {
      const auto path = topology::bfs_path(world.initial_links, f.source, f.destination);
      for (std::size_t i = 0; i + 1 < path.size(); ++i) ++load[path[i]];
    }
    const std::uint32_t busiest = std::max<std::uint32_t>(1, *std::max_element(load.begin(), load.end()));
    rate = config.traffic.load * config.queue.service_rate / busiest;
  }
  for (auto& f : world.flows) f.rate = rate;
  return world;
}

struct Network::Impl {
  struct Awaiting {
    Packet packet;
    NodeId next_hop = kNoNode;
    std::uint32_t attempts = 0;
    sim::EventHandle timer;
  };

  struct Node {
    Node(NodeId id, const routing::DsrParams& dsr, const QueueConfig& q, bool finite, std::uint64_t seed)
        : id(id),
          agent(id, dsr),
          queue(q.servers, finite ? std::optional<std::size_t>(q.capacity) : std::nullopt, q.discipline, q.window),
          service(seed, stream_name("service", id)),
          behavior_draws(seed, stream_name("behavior", id)),
          service_events(q.servers) {}

    NodeId id;
    topology::MobilityState mobility;
    energy::NodeEnergy energy;
    Time last_settle = 0.0;
    double busy_carry = 0.0;  // airtime already charged beyond last_settle
    bool asleep = false;
    bool death_handled = false;
    Behavior behavior = Behavior::Cooperative;
    routing::DsrAgent agent;
    queueing::ServiceQueue<Packet> queue;
    sim::RandomStream service;
    sim::RandomStream behavior_draws;
    std::vector<std::optional<sim::EventHandle>> service_events;
    std::map<std::uint64_t, Awaiting> awaiting;
    std::unordered_set<std::uint64_t> holding;  // DATA uids this relay still carries
    std::map<NodeId, double> learned_cost;
    std::map<NodeId, std::uint64_t> discovery_round;
  };

  Impl(const ScenarioConfig& c, World w, TraceSink t, RoleSink r)
      : config(c), world(std::move(w)), trace(std::move(t)), role_sink(std::move(r)),
        mobility(c.seed, "mobility") {
    dsr = config.dsr;
    if (config.is_nfpqr()) dsr.replies_per_request = config.nfpqr.replies;
    weights = routing::CostWeights{config.nfpqr.alpha, config.nfpqr.beta, config.w_ref()};
    thresholds = routing::AdmissionThresholds{config.nfpqr.theta_q, config.nfpqr.theta_e};
    const std::size_t n = config.nodes;
    nodes.reserve(n);
    for (NodeId i = 0; i < n; ++i) {
      nodes.emplace_back(i, dsr, config.queue, config.is_nfpqr(), config.seed);
      Node& node = nodes.back();
      node.mobility = topology::make_mobility_state(world.positions[i], 0.0);
      node.energy = energy::NodeEnergy::full(config.energy);
      node.behavior = world.behavior[i];
    }
    positions = world.positions;
    links = world.initial_links;
    roles.assign(n, routing::ClusterRole{});
    protected_nodes.assign(n, 0);
    for (const auto& f : world.flows) {
      protected_nodes[f.source] = 1;
      protected_nodes[f.destination] = 1;
    }
    control_delay = config.energy.airtime(routing::kControlBits) + config.link.processing;
    for (std::size_t i = 0; i < world.flows.size(); ++i) {
      flow_streams.emplace_back(config.seed, stream_name("traffic", i));
    }
  }

  // ---- bookkeeping ---------------------------------------------------------

  void emit(TraceRecord r) {
    if (trace) trace(r);
  }

  void emit_packet(TraceKind kind, NodeId node, const Packet& p) {
    TraceRecord r;
    r.time = sim.now();
    r.kind = kind;
    r.src = p.source;
    r.dst = p.destination;
    r.node = node;
    r.uid = p.uid;
    r.bits = p.payload_bits;
    emit(std::move(r));
  }

  void emit_transmission(NodeId sender, const Packet& p) {
    TraceRecord r;
    r.time = sim.now();
    switch (p.kind) {
      case PacketKind::RREQ: r.kind = TraceKind::RREQ; break;
      case PacketKind::RREP: r.kind = TraceKind::RREP; break;
      case PacketKind::RERR:
        r.kind = p.reason == routing::ErrorReason::Congestion ? TraceKind::CERR : TraceKind::RERR;
        break;
      case PacketKind::DATA: r.kind = TraceKind::DATA; break;
      case PacketKind::ACK: r.kind = TraceKind::ACK; break;
    }
    r.src = p.source;
    r.dst = p.destination;
    r.route = p.kind == PacketKind::RREQ ? p.traversed : p.route;
    if (p.kind == PacketKind::RREQ) r.ttl = p.ttl;
    r.node = sender;
    r.uid = p.uid;
    r.bits = p.payload_bits;
    emit(std::move(r));
  }

  Time data_delay(std::uint64_t bits) const { return config.energy.airtime(bits) + config.link.processing; }

  Time ack_timeout(std::uint64_t bits) const {
    return 2.0 * (config.energy.airtime(bits) + config.energy.airtime(routing::kControlBits) +
                  2.0 * config.link.processing);
  }

  bool alive(NodeId v) const { return nodes[v].energy.alive(); }
  bool awake(NodeId v) const { return alive(v) && !nodes[v].asleep; }

  double energy_fraction(NodeId v) const { return nodes[v].energy.residual / config.energy.initial; }

  double own_cost(NodeId v) const {
    return routing::node_cost(nodes[v].queue.window_mean_sojourn(), energy_fraction(v), weights).scalar;
  }

  // ---- energy --------------------------------------------------------------

  /// Charges idle (or sleep) power from the last settlement to now.
  void settle(Node& node) {
    if (!node.energy.alive()) return;
    const Time now = sim.now();
    const Time elapsed = now - node.last_settle;
    if (elapsed <= 0.0) return;
    const double covered = std::min(node.busy_carry, elapsed);
    node.busy_carry -= covered;
    const Time rest = elapsed - covered;
    node.energy = energy::charge(node.energy, node.asleep ? energy::Activity::Sleep : energy::Activity::Idle,
                                 rest, config.energy, node.last_settle + covered);
    node.last_settle = now;
    if (!node.energy.alive()) mark_dead(node);
  }

  void spend(Node& node, energy::Activity activity, std::uint64_t bits) {
    settle(node);
    if (!node.energy.alive()) return;
    const Time airtime = config.energy.airtime(bits);
    node.energy = energy::charge(node.energy, activity, airtime, config.energy, sim.now());
    node.busy_carry += airtime;
    if (!node.energy.alive()) mark_dead(node);
  }

  /// Settles and reports whether the node can act now.
  bool ready(NodeId v) {
    settle(nodes[v]);
    return awake(v);
  }

  void mark_dead(Node& node) {
    const NodeId v = node.id;
    sim.schedule(sim.now(), sim::EventKind::PowerStateChange, [this, v] { handle_death(v); });
  }

  void handle_death(NodeId v) {
    Node& node = nodes[v];
    if (node.death_handled) return;
    node.death_handled = true;
    TraceRecord r;
    r.time = node.energy.death_time.value_or(sim.now());
    r.kind = TraceKind::DEATH;
    r.node = v;
    emit(std::move(r));

    for (auto& h : node.service_events) {
      if (h) sim.cancel(*h);
      h.reset();
    }
    for (auto& c : node.queue.clear(sim.now())) drop(v, c.payload);
    for (auto& [uid, a] : node.awaiting) {
      sim.cancel(a.timer);
      drop(v, a.packet);
    }
    node.awaiting.clear();
    for (auto& p : node.agent.drain_pending()) drop(v, p);
    refresh_links();
    if (config.protocol == Protocol::NfpqrClustered && roles[v].role == routing::Role::Head) elect();
  }

  // A DATA packet exists as one copy per holder plus one per transmission in
  // flight; a lost ACK or a sender dying mid-hop leaves several. The packet
  // is dropped only when its last copy is gone.

  /// `v` no longer holds the packet; `lost` when it did not pass it on.
  void release_copy(NodeId v, const Packet& p, bool lost) {
    nodes[v].holding.erase(p.uid);
    release_flight(v, p, lost);
  }

  void release_flight(NodeId v, const Packet& p, bool lost) {
    auto it = copies.find(p.uid);
    if (it == copies.end()) throw InvariantViolation("packet " + std::to_string(p.uid) + " has no live copy");
    if (--it->second > 0) return;
    copies.erase(it);
    if (lost && !delivered.contains(p.uid)) emit_packet(TraceKind::DROP, v, p);
  }

  void drop(NodeId v, const Packet& p) { release_copy(v, p, true); }

  // ---- topology ------------------------------------------------------------

  std::vector<std::uint8_t> up_flags(bool include_sleeping) const {
    std::vector<std::uint8_t> up(nodes.size());
    for (NodeId i = 0; i < nodes.size(); ++i) up[i] = include_sleeping ? alive(i) : awake(i);
    return up;
  }

  void refresh_links() {
    links = topology::rebuild_links(positions, config.range, up_flags(false), topology::Backend::Serial);
  }

  void tick(std::uint64_t k) {
    for (auto& node : nodes) settle(node);
    if (config.mobility.speed_max > 0.0) {
      const Time now = sim.now();
      for (auto& node : nodes) {
        if (!node.energy.alive()) continue;
        node.mobility = topology::advance_mobility(node.mobility, last_move, now - last_move, mobility,
                                                   config.area, config.mobility);
        positions[node.id] = node.mobility.current;
      }
      last_move = now;
      refresh_links();
    }
    for (auto& node : nodes) {
      if (node.agent.pending_count() == 0) continue;
      for (auto& p : node.agent.expire_pending(sim.now())) drop(node.id, p);
    }
    const Time next = static_cast<double>(k + 1) * config.mobility_tick;
    if (next <= config.sim_time) {
      sim.schedule(next, sim::EventKind::MoveUpdate, [this, k] { tick(k + 1); });
    }
  }

  void elect() {
    ++stats.elections;
    std::vector<double> energies(nodes.size());
    for (NodeId i = 0; i < nodes.size(); ++i) energies[i] = nodes[i].energy.residual;
    const auto up = up_flags(false);
    roles = routing::elect_clusters(links, energies, up);
    if (auto problems = routing::check_cluster_roles(roles, links, up); !problems.empty()) {
      throw InvariantViolation("cluster roles: " + problems.front());
    }
    for (NodeId v = 0; v < nodes.size(); ++v) {
      if (!up[v]) continue;
      if (role_sink) role_sink(sim.now(), v, roles[v].role, roles[v].head);
      if (roles[v].role != routing::Role::Head) {
        nodes[roles[v].head].agent.cache().add({roles[v].head, v}, sim.now());
      }
    }
  }

  void reelection_timer() {
    elect();
    const Time next = sim.now() + config.nfpqr.reelection;
    if (next <= config.sim_time) sim.schedule(next, sim::EventKind::Timer, [this] { reelection_timer(); });
  }

  void plan_sleep() {
    ++stats.sleep_plans;
    for (auto& node : nodes) settle(node);
    for (auto& node : nodes) node.asleep = false;
    auto keep = protected_nodes;
    for (const auto& node : nodes) {
      if (node.queue.in_system() > 0 || !node.awaiting.empty() || node.agent.pending_count() > 0) keep[node.id] = 1;
    }
    const auto alive_flags = up_flags(true);
    const auto full = topology::rebuild_links(positions, config.range, alive_flags, topology::Backend::Serial);
    std::vector<double> energies(nodes.size());
    for (NodeId i = 0; i < nodes.size(); ++i) energies[i] = nodes[i].energy.residual;
    try {
      for (NodeId v : topology::plan_power_states(full, energies, keep, alive_flags)) nodes[v].asleep = true;
    } catch (const NotConnected&) {
      // a partitioned network keeps every radio on
    }
    for (auto& node : nodes) {
      if (node.energy.alive()) node.energy.state = node.asleep ? energy::PowerState::Sleep : energy::PowerState::On;
    }
    refresh_links();
    const Time next = sim.now() + config.power_interval;
    if (next <= config.sim_time) sim.schedule(next, sim::EventKind::PowerStateChange, [this] { plan_sleep(); });
  }

  // ---- radio ---------------------------------------------------------------

  /// Transmission start at `sender`. Charges tx, and rx at every neighbor
  /// in range. Returns the neighbor list at send time.
  std::vector<NodeId> radiate(NodeId sender, const Packet& p) {
    emit_transmission(sender, p);
    const std::vector<NodeId> hearers = links.adjacency[sender];
    spend(nodes[sender], energy::Activity::Tx, p.payload_bits);
    for (NodeId u : hearers) spend(nodes[u], energy::Activity::Rx, p.payload_bits);
    return hearers;
  }

  void broadcast(NodeId sender, const Packet& p) {
    if (p.kind == PacketKind::RREQ) count_rreq(sender, p);
    const auto hearers = radiate(sender, p);
    auto shared = std::make_shared<const Packet>(p);
    for (NodeId u : hearers) {
      sim.schedule_in(control_delay, sim::EventKind::PacketArrival,
                      [this, u, sender, shared] { receive(u, sender, *shared); });
    }
  }

  /// Unicast over one hop. The receiver gets it when linked at send time;
  /// other neighbors overhear.
  void unicast(NodeId sender, NodeId receiver, const Packet& p) {
    if ((p.kind == PacketKind::DATA || p.kind == PacketKind::RREP) && !routing::loop_free(p.route)) {
      throw InvariantViolation("looping source route sent by node " + std::to_string(sender));
    }
    const auto hearers = radiate(sender, p);
    bool reachable = false;
    for (NodeId u : hearers) {
      if (u == receiver) {
        reachable = true;
      } else {
        overhear(u, sender, p);
      }
    }
    if (!reachable) return;
    if (p.kind == PacketKind::DATA) ++copies[p.uid];
    const Time delay = p.kind == PacketKind::DATA ? data_delay(p.payload_bits) : control_delay;
    auto shared = std::make_shared<const Packet>(p);
    sim.schedule_in(delay, sim::EventKind::PacketArrival,
                    [this, receiver, sender, shared] { receive(receiver, sender, *shared); });
  }

  void overhear(NodeId u, NodeId sender, const Packet& p) {
    if (!awake(u) || !config.dsr.promiscuous) return;
    Node& node = nodes[u];
    switch (p.kind) {
      case PacketKind::DATA:
      case PacketKind::RREP:
        routing::promiscuous_learn(node.agent.cache(), p, sender, true, sim.now());
        break;
      case PacketKind::RERR:
        if (p.reason == routing::ErrorReason::LinkBroken) node.agent.handle_rerr(p);
        break;
      default:
        break;
    }
  }

  bool misbehaves(NodeId v, bool data) {
    Node& node = nodes[v];
    const bool applies = node.behavior == Behavior::Faulty || (node.behavior == Behavior::Selfish && data);
    return applies && node.behavior_draws.bernoulli(config.behavior.drop_probability);
  }

  void receive(NodeId v, NodeId from, const Packet& p) {
    if (!ready(v)) {
      if (p.kind == PacketKind::DATA) release_flight(v, p, true);
      return;
    }
    switch (p.kind) {
      case PacketKind::RREQ: on_rreq(v, from, p); break;
      case PacketKind::RREP: on_rrep(v, p); break;
      case PacketKind::RERR: on_rerr(v, p); break;
      case PacketKind::DATA: on_data(v, from, p); break;
      case PacketKind::ACK: on_ack(v, p); break;
    }
  }

  // ---- route discovery -----------------------------------------------------

  void count_rreq(NodeId sender, const Packet& p) {
    ++stats.rreq_transmissions;
    const auto key = std::make_pair(p.source, p.request_id);
    stats.max_rreq_per_discovery = std::max(stats.max_rreq_per_discovery, ++rreq_per_discovery[key]);
    const auto fkey = std::make_tuple(sender, p.source, p.request_id);
    stats.max_forwards_per_node_request = std::max(stats.max_forwards_per_node_request, ++forwards[fkey]);
  }

  void learn_costs(NodeId v, const SourceRoute& hops, const std::vector<double>& costs) {
    if (!config.is_nfpqr()) return;
    auto& table = nodes[v].learned_cost;
    for (std::size_t i = 0; i < hops.size() && i < costs.size(); ++i) {
      if (hops[i] != v && !std::isnan(costs[i])) table[hops[i]] = costs[i];
    }
  }

  routing::RouteChooser chooser(NodeId v) {
    if (!config.is_nfpqr()) return routing::choose_first;
    return [this, v](std::span<const SourceRoute> routes) {
      const auto& table = nodes[v].learned_cost;
      return routing::select_route(routes, [&table](NodeId n) {
        auto it = table.find(n);
        return it == table.end() ? 0.0 : it->second;
      });
    };
  }

  void start_discovery(NodeId v, Packet rreq) {
    Node& node = nodes[v];
    const NodeId dest = rreq.destination;
    const Time timeout = node.agent.begin_discovery(dest);
    ++stats.discoveries;
    if (config.protocol == Protocol::NfpqrClustered) {
      if (routing::clustered_discovery(v, dest, roles, links) == routing::DiscoveryScope::Backbone) {
        rreq.backbone_only = true;
        ++stats.backbone_discoveries;
      } else {
        ++stats.backbone_fallbacks;
      }
    }
    rreq.uid = ++next_control_uid;
    if (config.is_nfpqr()) rreq.hop_costs = {own_cost(v)};
    const std::uint64_t round = ++node.discovery_round[dest];
    broadcast(v, rreq);
    sim.schedule_in(timeout, sim::EventKind::Timer, [this, v, dest, round] { discovery_timeout(v, dest, round); });
  }

  void discovery_timeout(NodeId v, NodeId dest, std::uint64_t round) {
    Node& node = nodes[v];
    if (node.discovery_round[dest] != round || !node.agent.discovering(dest)) return;
    if (!ready(v)) return;
    if (!node.agent.has_pending(dest)) {
      node.agent.end_discovery(dest);
      return;
    }
    if (node.agent.cache().has_route(dest)) {
      node.agent.end_discovery(dest);
      release(v, dest);
      return;
    }
    start_discovery(v, node.agent.new_rreq(dest));
  }

  void on_rreq(NodeId v, NodeId from, const Packet& p) {
    Node& node = nodes[v];
    if (config.dsr.promiscuous) routing::promiscuous_learn(node.agent.cache(), p, from, true, sim.now());
    learn_costs(v, p.traversed, p.hop_costs);
    const bool is_dest = v == p.destination;
    if (config.is_nfpqr() &&
        routing::admit_rreq(is_dest, node.queue.occupancy_fraction(), energy_fraction(v), thresholds) ==
            routing::Admission::Suppress) {
      ++stats.suppressed_rreqs;
      return;
    }
    // A Member's backbone RREQ goes to its Head only.
    if (p.backbone_only && !is_dest && roles[from].role == routing::Role::Member && roles[from].head != v) return;
    // Backbone discovery yields backbone routes: Members only answer as destination.
    if (p.backbone_only && roles[v].role == routing::Role::Member && !is_dest) {
      node.agent.seen().record(p.source, p.request_id, sim.now());
      return;
    }
    const auto out = routing::handle_rreq(v, p, node.agent.seen(), node.agent.cache(), dsr, sim.now());
    switch (out.decision) {
      case routing::RreqDecision::Drop:
        return;
      case routing::RreqDecision::Reply:
        reply(v, p, out.reply_route);
        return;
      case routing::RreqDecision::Forward:
        if (misbehaves(v, false)) return;
        broadcast(v, routing::forwarded_rreq(p, v, config.is_nfpqr() ? own_cost(v) : 0.0));
        return;
    }
  }

  void reply(NodeId v, const Packet& rreq, const SourceRoute& route) {
    if (!routing::loop_free(route)) throw InvariantViolation("looping reply route at node " + std::to_string(v));
    Packet rrep;
    rrep.kind = PacketKind::RREP;
    rrep.uid = ++next_control_uid;
    rrep.source = route.front();
    rrep.destination = route.back();
    rrep.request_id = rreq.request_id;
    rrep.route = route;
    rrep.payload_bits = routing::kControlBits;
    if (config.is_nfpqr()) {
      std::map<NodeId, double> known;
      for (std::size_t i = 0; i < rreq.traversed.size() && i < rreq.hop_costs.size(); ++i) {
        known[rreq.traversed[i]] = rreq.hop_costs[i];
      }
      known[v] = own_cost(v);
      for (NodeId hop : route) {
        auto it = known.find(hop);
        rrep.hop_costs.push_back(it == known.end() ? std::numeric_limits<double>::quiet_NaN() : it->second);
      }
    }
    const std::size_t pos = routing::position_in(route, v);
    if (pos == 0 || pos >= route.size()) throw InvariantViolation("replying node is not on the reply route");
    if (v == rreq.destination) {
      SourceRoute back(route.rbegin(), route.rend());
      nodes[v].agent.cache().add(back, sim.now());
    }
    unicast(v, route[pos - 1], rrep);
  }

  void on_rrep(NodeId v, const Packet& p) {
    Node& node = nodes[v];
    const std::size_t pos = routing::position_in(p.route, v);
    if (pos >= p.route.size()) return;
    routing::promiscuous_learn(node.agent.cache(), p, v, true, sim.now());
    learn_costs(v, p.route, p.hop_costs);
    if (pos > 0) {
      if (misbehaves(v, false)) return;
      unicast(v, p.route[pos - 1], p);
      return;
    }
    stats.discovered_routes.push_back(p.route);
    node.agent.end_discovery(p.destination);
    release(v, p.destination);
  }

  void release(NodeId v, NodeId dest) {
    for (auto& packet : nodes[v].agent.release_pending(dest, chooser(v))) enqueue(v, std::move(packet));
  }

  // ---- errors --------------------------------------------------------------

  void send_error(NodeId v, const Packet& data, NodeId broken_to, routing::ErrorReason reason) {
    const std::size_t pos = routing::position_in(data.route, v);
    Packet err;
    err.kind = PacketKind::RERR;
    err.uid = ++next_control_uid;
    err.source = v;
    err.destination = data.source;
    err.route.assign(data.route.rbegin() + static_cast<std::ptrdiff_t>(data.route.size() - 1 - pos),
                     data.route.rend());
    err.broken_link = {v, broken_to};
    err.reason = reason;
    err.payload_bits = routing::kControlBits;
    if (err.route.size() >= 2) unicast(v, err.route[1], err);
  }

  void on_rerr(NodeId v, const Packet& p) {
    Node& node = nodes[v];
    const std::size_t pos = routing::position_in(p.route, v);
    if (pos >= p.route.size()) return;
    if (p.reason == routing::ErrorReason::LinkBroken) node.agent.handle_rerr(p);
    if (pos + 1 < p.route.size()) {
      if (misbehaves(v, false)) return;
      unicast(v, p.route[pos + 1], p);
      return;
    }
    if (p.reason == routing::ErrorReason::Congestion) {
      node.learned_cost[p.broken_link.first] = weights.alpha + weights.beta;
      return;
    }
    for (NodeId dest : node.agent.pending_destinations()) resume(v, dest);
  }

  /// Sends what the source holds for `dest`, discovering first if needed.
  void resume(NodeId v, NodeId dest) {
    Node& node = nodes[v];
    if (!node.agent.has_pending(dest)) return;
    if (node.agent.cache().has_route(dest)) {
      release(v, dest);
    } else if (!node.agent.discovering(dest)) {
      start_discovery(v, node.agent.new_rreq(dest));
    }
  }

  // ---- data ----------------------------------------------------------------

  void generate(std::size_t flow_index) {
    const Flow& f = world.flows[flow_index];
    const Time stop = config.traffic.stop.value_or(config.sim_time);
    const Time next = sim.now() + flow_streams[flow_index].exponential(f.rate);
    if (next < stop) {
      sim.schedule(next, sim::EventKind::TrafficGen, [this, flow_index] { generate(flow_index); });
    }
    if (!ready(f.source)) return;
    Packet data;
    data.kind = PacketKind::DATA;
    data.uid = ++next_data_uid;
    data.source = f.source;
    data.destination = f.destination;
    data.payload_bits = f.bits;
    data.created = sim.now();
    emit_packet(TraceKind::ORIG, f.source, data);
    ++copies[data.uid];
    nodes[f.source].holding.insert(data.uid);

    Node& node = nodes[f.source];
    auto res = node.agent.originate(std::move(data), sim.now(), chooser(f.source));
    using Kind = routing::DsrAgent::OriginateKind;
    switch (res.kind) {
      case Kind::Send: enqueue(f.source, std::move(res.packet)); break;
      case Kind::StartDiscovery: start_discovery(f.source, std::move(res.rreq)); break;
      case Kind::Buffered: break;
      case Kind::Dropped: drop(f.source, res.packet); break;
      case Kind::DeliverLocal:
        delivered.insert(res.packet.uid);
        emit_packet(TraceKind::RECV, f.source, res.packet);
        release_copy(f.source, res.packet, false);
        break;
    }
  }

  void enqueue(NodeId v, Packet p) {
    if (!routing::loop_free(p.route)) throw InvariantViolation("looping DATA route at node " + std::to_string(v));
    if (p.traversed.empty()) p.traversed = {v};
    Node& node = nodes[v];
    emit_packet(TraceKind::ENQ, v, p);
    queueing::Customer<Packet> c;
    c.arrival = sim.now();
    c.service_time = node.service.exponential(config.queue.service_rate);
    c.payload = std::move(p);
    const std::uint64_t uid = c.payload.uid;
    const NodeId source = c.payload.source;
    Packet copy_for_error;
    if (node.queue.capacity()) copy_for_error = c.payload;
    auto res = node.queue.enqueue(std::move(c), sim.now());
    if (!res.accepted) {
      TraceRecord r;
      r.time = sim.now();
      r.kind = TraceKind::BLOCK;
      r.src = source;
      r.dst = copy_for_error.destination;
      r.node = v;
      r.uid = uid;
      r.bits = copy_for_error.payload_bits;
      emit(std::move(r));
      if (v != source) {
        ++stats.cerr_generated;
        send_error(v, copy_for_error, v, routing::ErrorReason::Congestion);
      }
      drop(v, copy_for_error);
      return;
    }
    if (res.started) schedule_service(v, *res.started);
  }

  void schedule_service(NodeId v, const queueing::ServiceStart& s) {
    nodes[v].service_events[s.server] =
        sim.schedule(s.completes_at, sim::EventKind::ServiceComplete, [this, v, server = s.server] {
          service_done(v, server);
        });
  }

  void service_done(NodeId v, std::size_t server) {
    Node& node = nodes[v];
    node.service_events[server].reset();
    auto res = node.queue.complete(server, sim.now());
    if (res.started) schedule_service(v, *res.started);
    Packet p = std::move(res.departure.customer.payload);
    if (!ready(v)) {
      drop(v, p);
      return;
    }
    const auto next = routing::forward_data(v, p);
    if (next.decision != routing::DataDecision::Relay) throw InvariantViolation("queued packet already at destination");
    Awaiting a;
    a.next_hop = next.next_hop;
    a.attempts = 1;
    a.packet = std::move(p);
    const std::uint64_t uid = a.packet.uid;
    unicast(v, a.next_hop, a.packet);
    a.timer = sim.schedule_in(ack_timeout(a.packet.payload_bits), sim::EventKind::Timer,
                              [this, v, uid] { ack_missing(v, uid); });
    node.awaiting.emplace(uid, std::move(a));
  }

  void ack_missing(NodeId v, std::uint64_t uid) {
    Node& node = nodes[v];
    auto it = node.awaiting.find(uid);
    if (it == node.awaiting.end()) return;
    if (!ready(v)) return;  // death handling drops it
    Awaiting& a = it->second;
    if (a.attempts <= config.dsr.retransmit_limit) {
      ++a.attempts;
      unicast(v, a.next_hop, a.packet);
      a.timer = sim.schedule_in(ack_timeout(a.packet.payload_bits), sim::EventKind::Timer,
                                [this, v, uid] { ack_missing(v, uid); });
      return;
    }
    Packet p = std::move(a.packet);
    const NodeId next = a.next_hop;
    node.awaiting.erase(it);
    hop_failed(v, next, std::move(p));
  }

  void hop_failed(NodeId v, NodeId next, Packet p) {
    ++stats.hop_failures;
    ++stats.rerr_generated;
    TraceRecord r;
    r.time = sim.now();
    r.kind = TraceKind::HOPFAIL;
    r.src = p.source;
    r.dst = next;
    r.route = p.route;
    r.node = v;
    r.uid = p.uid;
    r.bits = p.payload_bits;
    emit(std::move(r));

    Node& node = nodes[v];
    node.agent.cache().purge_link(v, next);
    if (v != p.source) {
      send_error(v, p, next, routing::ErrorReason::LinkBroken);
      drop(v, p);
      return;
    }
    const NodeId dest = p.destination;
    p.traversed.clear();
    if (!node.agent.rebuffer(p, sim.now())) {
      drop(v, p);
      return;
    }
    resume(v, dest);
  }

  void on_ack(NodeId v, const Packet& ack) {
    Node& node = nodes[v];
    auto it = node.awaiting.find(ack.uid);
    if (it == node.awaiting.end()) return;
    sim.cancel(it->second.timer);
    const Packet p = std::move(it->second.packet);
    node.awaiting.erase(it);
    release_copy(v, p, false);
  }

  void on_data(NodeId v, NodeId from, const Packet& p) {
    Node& node = nodes[v];
    const bool relay = v != p.destination;
    if (relay && misbehaves(v, true)) {
      ++stats.selfish_discards;
      release_flight(v, p, true);
      return;
    }
    Packet ack;
    ack.kind = PacketKind::ACK;
    ack.uid = p.uid;
    ack.source = v;
    ack.destination = from;
    ack.payload_bits = routing::kControlBits;
    unicast(v, from, ack);
    if (relay ? node.holding.contains(p.uid) : delivered.contains(p.uid)) {
      release_flight(v, p, true);
      return;
    }

    Packet copy = p;
    copy.traversed.push_back(v);
    routing::promiscuous_learn(node.agent.cache(), copy, from, true, sim.now());
    if (relay) {
      node.holding.insert(p.uid);
      enqueue(v, std::move(copy));
      return;
    }
    if (copy.traversed != copy.route) {
      throw InvariantViolation("packet " + std::to_string(p.uid) + " did not follow its source route");
    }
    delivered.insert(p.uid);
    emit_packet(TraceKind::RECV, v, copy);
    release_flight(v, copy, false);
  }

  // ---- run -----------------------------------------------------------------

  void run() {
    if (config.protocol == Protocol::NfpqrClustered) {
      sim.schedule(0.0, sim::EventKind::Timer, [this] { reelection_timer(); });
    }
    if (config.power_management) {
      sim.schedule(0.0, sim::EventKind::PowerStateChange, [this] { plan_sleep(); });
    }
    if (config.mobility_tick <= config.sim_time) {
      sim.schedule(config.mobility_tick, sim::EventKind::MoveUpdate, [this] { tick(1); });
    }
    const Time stop = config.traffic.stop.value_or(config.sim_time);
    for (std::size_t i = 0; i < world.flows.size(); ++i) {
      const Time first = config.traffic.start + flow_streams[i].exponential(world.flows[i].rate);
      if (first < stop) sim.schedule(first, sim::EventKind::TrafficGen, [this, i] { generate(i); });
    }
    sim.run_until(config.sim_time);
    for (auto& node : nodes) {
      settle(node);
      if (!node.energy.alive() && !node.death_handled) {
        node.death_handled = true;
        TraceRecord r;
        r.time = node.energy.death_time.value_or(config.sim_time);
        r.kind = TraceKind::DEATH;
        r.node = node.id;
        emit(std::move(r));
      }
    }
  }

  ScenarioConfig config;
  World world;
  TraceSink trace;
  RoleSink role_sink;
  sim::Simulator sim;
  sim::RandomStream mobility;
  routing::DsrParams dsr;
  routing::CostWeights weights;
  routing::AdmissionThresholds thresholds;
  std::vector<Node> nodes;
  std::vector<topology::Position> positions;
  topology::LinkSet links;
  std::vector<routing::ClusterRole> roles;
  std::vector<std::uint8_t> protected_nodes;
  std::vector<sim::RandomStream> flow_streams;
  Time control_delay = 0.0;
  Time last_move = 0.0;
  std::uint64_t next_data_uid = 0;
  std::map<std::uint64_t, std::uint32_t> copies;  // live copies per DATA uid
  std::unordered_set<std::uint64_t> delivered;
  std::uint64_t next_control_uid = 0;
  NetworkStats stats;
  std::map<std::pair<NodeId, std::uint32_t>, std::uint64_t> rreq_per_discovery;
  std::map<std::tuple<NodeId, NodeId, std::uint32_t>, std::uint64_t> forwards;
};

Network::Network(const ScenarioConfig& config, World world, TraceSink trace, RoleSink roles)
    : impl_(std::make_unique<Impl>(config, std::move(world), std::move(trace), std::move(roles))) {}

Network::~Network() = default;

void Network::run() { impl_->run(); }

const World& Network::world() const noexcept { return impl_->world; }
const NetworkStats& Network::stats() const noexcept { return impl_->stats; }
const topology::LinkSet& Network::links() const noexcept { return impl_->links; }
const std::vector<routing::ClusterRole>& Network::roles() const noexcept { return impl_->roles; }

std::vector<energy::NodeEnergy> Network::energies() const {
  std::vector<energy::NodeEnergy> out;
  out.reserve(impl_->nodes.size());
  for (const auto& n : impl_->nodes) out.push_back(n.energy);
  return out;
}

}  // namespace manet::experiment
