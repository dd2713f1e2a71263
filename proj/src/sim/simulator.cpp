#include "manet/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "manet/error.hpp"

namespace manet::sim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::PacketArrival: return "PacketArrival";
    case EventKind::ServiceComplete: return "ServiceComplete";
    case EventKind::MoveUpdate: return "MoveUpdate";
    case EventKind::TrafficGen: return "TrafficGen";
    case EventKind::Timer: return "Timer";
    case EventKind::PowerStateChange: return "PowerStateChange";
  }
  return "Unknown";
}

EventHandle Simulator::schedule(Time time, EventKind kind,
                                std::function<void()> action) {
  if (std::isnan(time)) {
    throw SchedulingInPast("event time is NaN");
  }
  if (time < clock_) {
    if (clock_ - time > kTimeTieEpsilon) {
      throw SchedulingInPast("event at t=" + std::to_string(time) +
                             " precedes clock t=" + std::to_string(clock_));
    }
    time = clock_;
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push_back(Event{time, seq, kind, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), later);
  return EventHandle{seq};
}

void Simulator::cancel(EventHandle handle) {
  if (handle.seq >= next_seq_) return;
  const bool present = std::any_of(heap_.begin(), heap_.end(), [&](const Event& e) {
    return e.seq == handle.seq;
  });
  if (present) cancelled_.insert(handle.seq);
}

Time Simulator::run_until(Time t_end) {
  stop_requested_ = false;
  while (!heap_.empty() && !stop_requested_) {
    if (heap_.front().time > t_end) break;
    std::pop_heap(heap_.begin(), heap_.end(), later);
    Event event = std::move(heap_.back());
    heap_.pop_back();
    if (auto it = cancelled_.find(event.seq); it != cancelled_.end()) {
      cancelled_.erase(it);
      continue;
    }
    clock_ = event.time;
    ++dispatched_;
    if (observer_) observer_(event);
    if (event.action) event.action();
  }
  if (!stop_requested_ && std::isfinite(t_end) && t_end > clock_) clock_ = t_end;
  return clock_;
}

}  // namespace manet::sim
