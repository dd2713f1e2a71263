#include "manet/experiment/runner.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>

#include "manet/error.hpp"
#include "manet/metrics/trace.hpp"

namespace manet::experiment {

metrics::RunInfo run_info(const ScenarioConfig& config) {
  return metrics::RunInfo{std::string(to_string(config.protocol)), config.seed, config.nodes, config.sim_time,
                          config.periods};
}

RunResult run_scenario(const ScenarioConfig& config, std::ostream* trace) {
  const auto info = run_info(config);
  metrics::MetricsCollector collector(info);
  if (trace) metrics::write_trace_header(*trace, info);

  TraceSink sink = [&](const metrics::TraceRecord& r) {
    collector.consume(r);
    if (trace) metrics::write_trace_record(*trace, r);
  };
  RoleSink roles;
  if (trace) {
    roles = [trace](Time t, NodeId node, routing::Role role, NodeId head) {
      metrics::write_role_line(*trace, t, node, routing::to_string(role), head);
    };
  }
  Network network(config, build_world(config), sink, roles);
  network.run();

  RunResult result;
  result.report = collector.finalize();
  result.stats = network.stats();
  std::ostringstream csv;
  metrics::write_csv(csv, {result.report});
  result.csv = csv.str();
  return result;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::MeanDelay: return "mean_delay";
    case Metric::Throughput: return "throughput";
    case Metric::DeliveryRatio: return "delivery_ratio";
    case Metric::Overhead: return "ctrl_overhead_per_node";
    case Metric::Lifetime: return "network_lifetime";
  }
  return "?";
}

double metric_value(const RunResult& run, Metric metric) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto& s = run.report.summary;
  switch (metric) {
    case Metric::MeanDelay: return s.mean_delay.value_or(inf);
    case Metric::Throughput: return s.throughput;
    case Metric::DeliveryRatio: return run.report.delivery_ratio();
    case Metric::Overhead: return s.control_overhead_per_node;
    case Metric::Lifetime: return run.report.network_lifetime.value_or(inf);
  }
  return 0.0;
}

namespace {

bool lower_is_better(Metric m) { return m == Metric::MeanDelay || m == Metric::Overhead; }

constexpr Metric kMetrics[] = {Metric::MeanDelay, Metric::Throughput, Metric::DeliveryRatio, Metric::Overhead,
                               Metric::Lifetime};

}  // namespace

ComparisonReport compare(const std::vector<ScenarioConfig>& configs, const std::vector<std::uint64_t>& seeds,
                         topology::Backend backend) {
  if (configs.empty()) throw std::invalid_argument("compare needs at least one config");
  for (std::size_t c = 1; c < configs.size(); ++c) {
    const auto diff = differing_fields(configs[0], configs[c], true);
    if (!diff.empty()) {
      throw ConfigMismatch(diff.front(), "compared configs differ in " + diff.front());
    }
  }

  ComparisonReport report;
  report.seeds = seeds;
  for (const auto& c : configs) report.labels.emplace_back(to_string(c.protocol));
  report.runs.assign(configs.size(), std::vector<RunResult>(seeds.size()));

  const auto total = static_cast<long long>(configs.size() * seeds.size());
  auto one = [&](long long k) {
    const auto c = static_cast<std::size_t>(k) / seeds.size();
    const auto s = static_cast<std::size_t>(k) % seeds.size();
    ScenarioConfig cfg = configs[c];
    cfg.seed = seeds[s];
    report.runs[c][s] = run_scenario(cfg);
  };

  if (backend == topology::Backend::Serial) {
    for (long long k = 0; k < total; ++k) one(k);
  } else {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (long long k = 0; k < total; ++k) {
      try {
        one(k);
      } catch (...) {
#pragma omp critical(manet_compare_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  for (Metric m : kMetrics) {
    auto& wins = report.wins[m];
    wins.assign(configs.size(), 0);
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      std::size_t best = configs.size();
      bool tie = false;
      for (std::size_t c = 0; c < configs.size(); ++c) {
        const double v = metric_value(report.runs[c][s], m);
        if (best == configs.size()) {
          best = c;
          continue;
        }
        const double b = metric_value(report.runs[best][s], m);
        const bool better = lower_is_better(m) ? v < b : v > b;
        if (better) {
          best = c;
          tie = false;
        } else if (v == b) {
          tie = true;
        }
      }
      if (!tie && best < configs.size()) ++wins[best];
    }
  }
  return report;
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  out << metrics::kCsvHeader << '\n';
  for (const auto& per_config : report.runs) {
    for (const auto& run : per_config) metrics::write_csv_rows(out, run.report);
  }
}

void write_win_summary(std::ostream& out, const ComparisonReport& report) {
  out << "metric,protocol,wins,seeds\n";
  for (const auto& [metric, wins] : report.wins) {
    for (std::size_t c = 0; c < wins.size(); ++c) {
      out << to_string(metric) << ',' << report.labels[c] << ',' << wins[c] << ',' << report.seeds.size() << '\n';
    }
  }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  auto number = [&](std::string_view part) {
    std::uint64_t v = 0;
    const char* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, v);
    if (part.empty() || ec != std::errc{} || ptr != end) {
      throw InvalidValue("seeds", "bad seed '" + std::string(part) + "' in '" + text + "'");
    }
    return v;
  };
  std::vector<std::uint64_t> seeds;
  std::string_view rest(text);
  while (true) {
    const auto comma = rest.find(',');
    const auto part = rest.substr(0, comma);
    if (const auto dots = part.find(".."); dots != std::string_view::npos) {
      const auto lo = number(part.substr(0, dots));
      const auto hi = number(part.substr(dots + 2));
      if (hi < lo) throw InvalidValue("seeds", "empty seed range '" + std::string(part) + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(number(part));
    }
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return seeds;
}

}  // namespace manet::experiment
