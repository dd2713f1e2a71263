#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "manet/experiment/config.hpp"
#include "manet/experiment/network.hpp"
#include "manet/metrics/metrics.hpp"
#include "manet/topology/links.hpp"

namespace manet::experiment {

struct RunResult {
  metrics::RunReport report;
  NetworkStats stats;
  std::string csv;  // header + rows
};

metrics::RunInfo run_info(const ScenarioConfig& config);

/// Runs one scenario. When `trace` is given the full event trace (header,
/// events, role lines) is streamed to it.
RunResult run_scenario(const ScenarioConfig& config, std::ostream* trace = nullptr);

/// Metrics compared across protocols, per seed.
enum class Metric : std::uint8_t { MeanDelay, Throughput, DeliveryRatio, Overhead, Lifetime };

std::string_view to_string(Metric metric);

struct ComparisonReport {
  std::vector<std::string> labels;   // one per config, e.g. the protocol name
  std::vector<std::uint64_t> seeds;
  /// runs[c][s]: config c at seeds[s].
  std::vector<std::vector<RunResult>> runs;
  /// wins[metric][c]: seeds on which config c is strictly best.
  std::map<Metric, std::vector<std::uint32_t>> wins;
};

/// Runs every config at every seed. Configs must agree on everything but
/// the protocol (ConfigMismatch otherwise); each run's seed replaces the
/// config's. Runs are independent, so the OpenMP backend spreads them over
/// threads; the result does not depend on the backend.
ComparisonReport compare(const std::vector<ScenarioConfig>& configs, const std::vector<std::uint64_t>& seeds,
                         topology::Backend backend = topology::Backend::OpenMP);

/// Value of `metric` in a run's summary; lifetime is +inf without deaths
/// and mean delay is +inf without deliveries.
double metric_value(const RunResult& run, Metric metric);

/// Every run's rows under one header, configs outermost.
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

/// `metric,label,wins,seeds` rows.
void write_win_summary(std::ostream& out, const ComparisonReport& report);

/// Parses `1..20`, `3`, or `1,4,9` (mixable, comma-separated).
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace manet::experiment
