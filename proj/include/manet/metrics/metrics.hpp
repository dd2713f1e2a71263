#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "manet/types.hpp"

namespace manet::metrics {

/// One traced protocol event.
enum class TraceKind : std::uint8_t {
  // transmissions, one per send attempt
  RREQ,
  RREP,
  RERR,
  CERR,  // RERR raised by a full relay queue
  DATA,
  ACK,
  // DATA lifecycle
  ORIG,   // originated at `src`
  ENQ,    // offered to `node`'s forwarding queue
  BLOCK,  // rejected by `node`'s full queue
  DROP,   // last copy lost before delivery
  RECV,   // delivered at `dst`
  // node lifecycle
  DEATH,
  HOPFAIL,  // `node` gave up on next hop `dst` after retransmissions
};

std::string_view to_string(TraceKind kind);
std::optional<TraceKind> trace_kind_from(std::string_view text);
/// Every transmission except DATA.
bool is_control_transmission(TraceKind kind);

struct TraceRecord {
  Time time = 0.0;
  TraceKind kind = TraceKind::DATA;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  SourceRoute route;
  std::optional<std::uint32_t> ttl;
  NodeId node = kNoNode;  // acting node
  std::uint64_t uid = 0;
  std::uint64_t bits = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct RunInfo {
  std::string protocol;
  std::uint64_t seed = 0;
  std::uint32_t nodes = 0;
  Time sim_time = 0.0;
  std::uint32_t periods = 5;

  Time period_length() const noexcept { return sim_time / periods; }
  friend bool operator==(const RunInfo&, const RunInfo&) = default;
};

/// Metrics of one communication period, or of the whole run (index -1).
struct PeriodMetrics {
  int period = 0;
  std::optional<double> mean_delay;  // s; empty when nothing was delivered
  double throughput = 0.0;           // bit/s, by delivery time
  std::optional<double> delivery_ratio;  // of the packets originated in the period
  double drop_ratio = 0.0;
  double in_flight_ratio = 0.0;
  double blockage_probability = 0.0;     // BLOCK / ENQ
  double control_overhead_per_node = 0.0;
  std::uint32_t alive_nodes = 0;         // at period end

  // raw counters behind the ratios
  std::uint64_t deliveries = 0;
  double delay_sum = 0.0;
  std::uint64_t delivered_bits = 0;
  std::uint64_t originated = 0;
  std::uint64_t delivered = 0;  // of the originated cohort
  std::uint64_t dropped = 0;    // of the originated cohort
  std::uint64_t offered = 0;
  std::uint64_t blocked = 0;
  std::uint64_t control_tx = 0;
};

struct RunReport {
  RunInfo info;
  std::vector<PeriodMetrics> periods;
  PeriodMetrics summary;
  std::optional<Time> network_lifetime;  // first node death

  std::uint64_t originated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t blocked = 0;
  std::uint64_t hop_failures = 0;
  std::map<std::string, std::uint64_t> transmissions;  // by kind name

  double delivery_ratio() const noexcept {
    return originated == 0 ? 0.0 : static_cast<double>(delivered) / static_cast<double>(originated);
  }
};

/// Folds trace records into per-period metrics. The fold is the only path
/// from events to reported numbers, so replaying a saved trace reproduces
/// a live run's report exactly.
class MetricsCollector {
 public:
  explicit MetricsCollector(RunInfo info);

  void consume(const TraceRecord& record);

  /// Attributes `time` to a 1-based period, clamped to [1, periods].
  int period_of(Time time) const noexcept;

  RunReport finalize() const;

  const RunInfo& info() const noexcept { return info_; }

 private:
  struct Origin {
    Time time = 0.0;
    int period = 0;
  };

  RunInfo info_;
  std::vector<PeriodMetrics> periods_;
  std::map<std::uint64_t, Origin> open_;  // originated, not yet resolved
  std::vector<Time> deaths_;
  std::uint64_t hop_failures_ = 0;
  std::map<std::string, std::uint64_t> transmissions_;
};

/// `protocol,seed,period,mean_delay_s,throughput_bps,delivery_ratio,blockage_prob,ctrl_overhead_per_node,alive_nodes`
inline constexpr std::string_view kCsvHeader =
    "protocol,seed,period,mean_delay_s,throughput_bps,delivery_ratio,blockage_prob,"
    "ctrl_overhead_per_node,alive_nodes";

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// One row per period plus the summary row (period -1). No header.
void write_csv_rows(std::ostream& out, const RunReport& report);

/// Header followed by the rows of every report.
void write_csv(std::ostream& out, const std::vector<RunReport>& reports);

std::string csv_string(const RunReport& report);

}  // namespace manet::metrics
