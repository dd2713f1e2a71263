#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "manet/error.hpp"
#include "manet/queueing/measures.hpp"
#include "manet/types.hpp"

namespace manet::queueing {

enum class Discipline : std::uint8_t { FIFO, LIFO, Priority };

template <typename Payload>
struct Customer {
  std::uint64_t id = 0;
  Time arrival = 0.0;
  double service_time = 0.0;  // drawn at arrival so disciplines can share draws
  int priority = 0;           // lower is served first under Priority
  Payload payload{};
};

/// A customer that finished service.
template <typename Payload>
struct Departure {
  Customer<Payload> customer;
  Time start = 0.0;
  Time end = 0.0;
  double delay = 0.0;    // D_i
  double sojourn = 0.0;  // W_i = D_i + S_i
};

/// Service began on `server`; the caller schedules completion at `completes_at`.
struct ServiceStart {
  std::size_t server = 0;
  Time completes_at = 0.0;
};

template <typename Payload>
struct EnqueueResult {
  bool accepted = false;
  std::optional<ServiceStart> started;
};

template <typename Payload>
struct CompletionResult {
  Departure<Payload> departure;
  std::optional<ServiceStart> started;
};

/// Multi-server queue with a shared waiting line, finite or infinite
/// system capacity, and time-weighted performance accumulators.
///
/// The queue does not own a clock. Callers pass the current time to every
/// mutating call and schedule completions themselves from the returned
/// ServiceStart.
template <typename Payload>
class ServiceQueue {
 public:
  ServiceQueue(std::uint32_t servers = 1,
               std::optional<std::size_t> capacity = std::nullopt,
               Discipline discipline = Discipline::FIFO,
               std::size_t window = 50)
      : servers_(servers), capacity_(capacity), discipline_(discipline), window_(window) {
    if (servers_ == 0) throw std::invalid_argument("a queue needs at least one server");
    if (capacity_ && *capacity_ == 0) throw std::invalid_argument("capacity must be positive");
    busy_.resize(servers_);
  }

  std::size_t in_queue() const noexcept { return waiting_.size(); }
  std::size_t in_service() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        busy_.begin(), busy_.end(), [](const auto& s) { return s.has_value(); }));
  }
  std::size_t in_system() const noexcept { return in_queue() + in_service(); }
  std::optional<std::size_t> capacity() const noexcept { return capacity_; }
  std::uint32_t servers() const noexcept { return servers_; }
  Discipline discipline() const noexcept { return discipline_; }

  /// in_system / capacity, or 0 for an infinite queue.
  double occupancy_fraction() const noexcept {
    return capacity_ ? static_cast<double>(in_system()) / static_cast<double>(*capacity_) : 0.0;
  }

  const QueueStats& stats() const noexcept { return stats_; }

  /// Advances the Q(t)/L(t) integrals to `now` (rectangle rule).
  void observe(Time now) {
    const Time dt = now - stats_.last_update;
    if (dt > 0.0) {
      const auto q = static_cast<double>(in_queue());
      const auto l = static_cast<double>(in_system());
      stats_.area_queue += q * dt;
      stats_.area_system += l * dt;
      if (l == 0.0) stats_.all_idle_time += dt;
      stats_.last_update = now;
    }
  }

  /// Starts a new observation window at `now`; customers present stay.
  void reset_statistics(Time now) {
    observe(now);
    stats_ = QueueStats{};
    stats_.window_start = now;
    stats_.last_update = now;
  }

  EnqueueResult<Payload> enqueue(Customer<Payload> customer, Time now) {
    observe(now);
    ++stats_.offered;
    if (capacity_ && in_system() >= *capacity_) {
      ++stats_.dropped;
      return {false, std::nullopt};
    }
    ++stats_.admitted;
    customer.arrival = now;
    customer.id = customer.id == 0 ? ++next_order_ : customer.id;
    waiting_.push_back(std::move(customer));
    return {true, try_start(now)};
  }

  /// Finishes the customer on `server` at `now`.
  CompletionResult<Payload> complete(std::size_t server, Time now) {
    if (server >= busy_.size() || !busy_[server]) {
      throw InvariantViolation("service completion on an idle server");
    }
    observe(now);
    InService active = std::move(*busy_[server]);
    busy_[server].reset();

    Departure<Payload> dep;
    dep.start = active.start;
    dep.end = active.start + active.customer.service_time;
    dep.delay = active.start - active.customer.arrival;
    dep.sojourn = dep.delay + active.customer.service_time;
    dep.customer = std::move(active.customer);

    ++stats_.served;
    stats_.sum_delay += dep.delay;
    stats_.sum_sojourn += dep.sojourn;
    stats_.sum_service += dep.customer.service_time;
    if (dep.delay > 0.0) ++stats_.delayed;

    recent_.push_back(dep.sojourn);
    recent_sum_ += dep.sojourn;
    if (recent_.size() > window_) {
      recent_sum_ -= recent_.front();
      recent_.pop_front();
    }
    return {std::move(dep), try_start(now)};
  }

  /// Mean W_i over the last `window` completions; 0 if none yet.
  double window_mean_sojourn() const noexcept {
    return recent_.empty() ? 0.0 : recent_sum_ / static_cast<double>(recent_.size());
  }

  /// Removes every waiting and in-service customer (node failure).
  std::vector<Customer<Payload>> clear(Time now) {
    observe(now);
    std::vector<Customer<Payload>> out;
    for (auto& s : busy_) {
      if (s) out.push_back(std::move(s->customer));
      s.reset();
    }
    for (auto& c : waiting_) out.push_back(std::move(c));
    waiting_.clear();
    return out;
  }

  /// Read-only view of the waiting line in arrival order.
  const std::deque<Customer<Payload>>& waiting() const noexcept { return waiting_; }

 private:
  struct InService {
    Customer<Payload> customer;
    Time start = 0.0;
  };

  std::size_t pick_next() const {
    switch (discipline_) {
      case Discipline::FIFO:
        return 0;
      case Discipline::LIFO:
        return waiting_.size() - 1;
      case Discipline::Priority: {
        std::size_t best = 0;
        for (std::size_t i = 1; i < waiting_.size(); ++i) {
          if (waiting_[i].priority < waiting_[best].priority) best = i;
        }
        return best;
      }
    }
    return 0;
  }

  std::optional<ServiceStart> try_start(Time now) {
    if (waiting_.empty()) return std::nullopt;
    auto idle = std::find_if(busy_.begin(), busy_.end(),
                             [](const auto& s) { return !s.has_value(); });
    if (idle == busy_.end()) return std::nullopt;
    const std::size_t pick = pick_next();
    InService next{std::move(waiting_[pick]), now};
    waiting_.erase(waiting_.begin() + static_cast<std::ptrdiff_t>(pick));
    const Time done = now + next.customer.service_time;
    *idle = std::move(next);
    return ServiceStart{static_cast<std::size_t>(idle - busy_.begin()), done};
  }

  std::uint32_t servers_;
  std::optional<std::size_t> capacity_;
  Discipline discipline_;
  std::size_t window_;
  std::deque<Customer<Payload>> waiting_;
  std::vector<std::optional<InService>> busy_;
  QueueStats stats_;
  std::deque<double> recent_;
  double recent_sum_ = 0.0;
  std::uint64_t next_order_ = 0;
};

}  // namespace manet::queueing
