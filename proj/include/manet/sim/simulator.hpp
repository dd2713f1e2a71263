#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "manet/types.hpp"

namespace manet::sim {

enum class EventKind : std::uint8_t {
  PacketArrival,
  ServiceComplete,
  MoveUpdate,
  TrafficGen,
  Timer,
  PowerStateChange,
};

std::string_view to_string(EventKind kind);

/// Events closer together than this are treated as simultaneous and
/// ordered by insertion sequence.
inline constexpr Time kTimeTieEpsilon = 1e-12;

struct Event {
  Time time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Timer;
  std::function<void()> action;
};

/// Identifies a scheduled event for cancellation.
struct EventHandle {
  std::uint64_t seq = 0;
};

/// Future-event list keyed on (time, seq) plus the simulation clock.
class Simulator {
 public:
  using DispatchObserver = std::function<void(const Event&)>;

  Time now() const noexcept { return clock_; }

  /// Throws SchedulingInPast when `time` precedes the clock by more than
  /// kTimeTieEpsilon; smaller undershoots are clamped to the clock.
  EventHandle schedule(Time time, EventKind kind, std::function<void()> action);

  EventHandle schedule_in(Time delay, EventKind kind,
                          std::function<void()> action) {
    return schedule(clock_ + delay, kind, std::move(action));
  }

  /// Cancelled events are skipped when they reach the head of the list.
  void cancel(EventHandle handle);

  /// Dispatches every pending event with time <= t_end in (time, seq)
  /// order. The clock ends at t_end when t_end is finite, otherwise at the
  /// time of the last dispatched event.
  Time run_until(Time t_end);

  /// Makes the current run_until return after the in-flight event.
  void stop() noexcept { stop_requested_ = true; }

  std::size_t pending() const noexcept { return heap_.size() - cancelled_.size(); }
  std::uint64_t dispatched() const noexcept { return dispatched_; }

  /// Called with every event just before its action runs.
  void set_observer(DispatchObserver observer) { observer_ = std::move(observer); }

 private:
  static bool later(const Event& a, const Event& b) noexcept {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }

  std::vector<Event> heap_;
  std::unordered_set<std::uint64_t> cancelled_;
  Time clock_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  bool stop_requested_ = false;
  DispatchObserver observer_;
};

}  // namespace manet::sim
