#include "manet/metrics/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "manet/error.hpp"

namespace manet::metrics {

namespace {

constexpr std::array<std::pair<TraceKind, std::string_view>, 13> kKindNames{{
    {TraceKind::RREQ, "RREQ"},   {TraceKind::RREP, "RREP"},   {TraceKind::RERR, "RERR"},
    {TraceKind::CERR, "CERR"},   {TraceKind::DATA, "DATA"},   {TraceKind::ACK, "ACK"},
    {TraceKind::ORIG, "ORIG"},   {TraceKind::ENQ, "ENQ"},     {TraceKind::BLOCK, "BLOCK"},
    {TraceKind::DROP, "DROP"},   {TraceKind::RECV, "RECV"},   {TraceKind::DEATH, "DEATH"},
    {TraceKind::HOPFAIL, "HOPFAIL"},
}};

bool is_transmission(TraceKind kind) {
  switch (kind) {
    case TraceKind::RREQ:
    case TraceKind::RREP:
    case TraceKind::RERR:
    case TraceKind::CERR:
    case TraceKind::DATA:
    case TraceKind::ACK:
      return true;
    default:
      return false;
  }
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string_view to_string(TraceKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<TraceKind> trace_kind_from(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

bool is_control_transmission(TraceKind kind) {
  return is_transmission(kind) && kind != TraceKind::DATA;
}

MetricsCollector::MetricsCollector(RunInfo info) : info_(std::move(info)) {
  if (info_.periods == 0) throw std::invalid_argument("at least one period is required");
  periods_.resize(info_.periods);
  for (std::uint32_t i = 0; i < info_.periods; ++i) periods_[i].period = static_cast<int>(i + 1);
}

int MetricsCollector::period_of(Time time) const noexcept {
  const Time len = info_.period_length();
  if (!(len > 0.0)) return 1;
  const auto idx = static_cast<long long>(std::floor(time / len)) + 1;
  return static_cast<int>(std::clamp<long long>(idx, 1, info_.periods));
}

void MetricsCollector::consume(const TraceRecord& r) {
  PeriodMetrics& p = periods_[static_cast<std::size_t>(period_of(r.time) - 1)];
  if (is_transmission(r.kind)) {
    ++transmissions_[std::string(to_string(r.kind))];
    if (is_control_transmission(r.kind)) ++p.control_tx;
    return;
  }
  auto resolve = [&](std::uint64_t uid) {
    auto it = open_.find(uid);
    if (it == open_.end()) {
      throw InvariantViolation("packet " + std::to_string(uid) + " resolved twice or never originated");
    }
    Origin origin = it->second;
    open_.erase(it);
    return origin;
  };
  switch (r.kind) {
    case TraceKind::ORIG:
      if (!open_.try_emplace(r.uid, Origin{r.time, period_of(r.time)}).second) {
        throw InvariantViolation("packet " + std::to_string(r.uid) + " originated twice");
      }
      ++p.originated;
      break;
    case TraceKind::ENQ:
      ++p.offered;
      break;
    case TraceKind::BLOCK:
      ++p.blocked;
      break;
    case TraceKind::DROP: {
      const Origin o = resolve(r.uid);
      ++periods_[static_cast<std::size_t>(o.period - 1)].dropped;
      break;
    }
    case TraceKind::RECV: {
      const Origin o = resolve(r.uid);
      const double delay = r.time - o.time;
      if (delay < 0.0) {
        throw InvariantViolation("negative end-to-end delay for packet " + std::to_string(r.uid));
      }
      ++p.deliveries;
      p.delay_sum += delay;
      p.delivered_bits += r.bits;
      ++periods_[static_cast<std::size_t>(o.period - 1)].delivered;
      break;
    }
    case TraceKind::DEATH:
      deaths_.push_back(r.time);
      break;
    case TraceKind::HOPFAIL:
      ++hop_failures_;
      break;
    default:
      break;
  }
}

RunReport MetricsCollector::finalize() const {
  RunReport report;
  report.info = info_;
  report.periods = periods_;
  report.hop_failures = hop_failures_;
  report.transmissions = transmissions_;
  const double nodes = std::max<double>(1.0, info_.nodes);
  const Time len = info_.period_length();

  PeriodMetrics total;
  total.period = -1;
  for (auto& p : report.periods) {
    if (p.deliveries > 0) p.mean_delay = p.delay_sum / static_cast<double>(p.deliveries);
    p.throughput = len > 0.0 ? static_cast<double>(p.delivered_bits) / len : 0.0;
    if (p.originated > 0) {
      p.delivery_ratio = ratio(p.delivered, p.originated);
      p.drop_ratio = ratio(p.dropped, p.originated);
      p.in_flight_ratio = ratio(p.originated - p.delivered - p.dropped, p.originated);
    }
    p.blockage_probability = ratio(p.blocked, p.offered);
    p.control_overhead_per_node = static_cast<double>(p.control_tx) / nodes;
    const Time end = len * p.period;
    const auto dead = std::count_if(deaths_.begin(), deaths_.end(), [&](Time t) {
      return p.period == static_cast<int>(info_.periods) || t <= end;
    });
    p.alive_nodes = info_.nodes - static_cast<std::uint32_t>(dead);

    total.deliveries += p.deliveries;
    total.delay_sum += p.delay_sum;
    total.delivered_bits += p.delivered_bits;
    total.originated += p.originated;
    total.delivered += p.delivered;
    total.dropped += p.dropped;
    total.offered += p.offered;
    total.blocked += p.blocked;
    total.control_tx += p.control_tx;
  }
  if (total.deliveries > 0) total.mean_delay = total.delay_sum / static_cast<double>(total.deliveries);
  total.throughput = info_.sim_time > 0.0 ? static_cast<double>(total.delivered_bits) / info_.sim_time : 0.0;
  if (total.originated > 0) {
    total.delivery_ratio = ratio(total.delivered, total.originated);
    total.drop_ratio = ratio(total.dropped, total.originated);
    total.in_flight_ratio = ratio(total.originated - total.delivered - total.dropped, total.originated);
  }
  total.blockage_probability = ratio(total.blocked, total.offered);
  total.control_overhead_per_node = static_cast<double>(total.control_tx) / nodes;
  total.alive_nodes = info_.nodes - static_cast<std::uint32_t>(deaths_.size());
  report.summary = total;

  report.originated = total.originated;
  report.delivered = total.delivered;
  report.dropped = total.dropped;
  report.in_flight = open_.size();
  report.blocked = total.blocked;
  if (!deaths_.empty()) report.network_lifetime = *std::min_element(deaths_.begin(), deaths_.end());
  if (report.originated != report.delivered + report.dropped + report.in_flight) {
    throw InvariantViolation("packet conservation violated");
  }
  return report;
}

std::string format_double(double value) {
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), end);
}

void write_csv_rows(std::ostream& out, const RunReport& report) {
  auto row = [&](const PeriodMetrics& p) {
    out << report.info.protocol << ',' << report.info.seed << ',' << p.period << ','
        << (p.mean_delay ? format_double(*p.mean_delay) : std::string()) << ','
        << format_double(p.throughput) << ','
        << (p.delivery_ratio ? format_double(*p.delivery_ratio) : std::string()) << ','
        << format_double(p.blockage_probability) << ','
        << format_double(p.control_overhead_per_node) << ',' << p.alive_nodes << '\n';
  };
  for (const auto& p : report.periods) row(p);
  row(report.summary);
}

void write_csv(std::ostream& out, const std::vector<RunReport>& reports) {
  out << kCsvHeader << '\n';
  for (const auto& r : reports) write_csv_rows(out, r);
}

std::string csv_string(const RunReport& report) {
  std::ostringstream out;
  write_csv(out, {report});
  return out.str();
}

}  // namespace manet::metrics
