#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "manet/metrics/metrics.hpp"

namespace manet::metrics {

/// Tab-separated event trace.
///
///   # manet-trace v1 protocol=dsr seed=1 nodes=30 sim_time=300 periods=5
///   time  kind  src  dst  route  ttl  node  uid  bits      (event lines)
///   time  node  role head                                  (cluster role lines)
///
/// Routes are comma-separated node ids. Absent fields are written as `-`.
/// Numbers use the shortest round-trip form, so a parsed trace holds the
/// exact values of the live run.

void write_trace_header(std::ostream& out, const RunInfo& info);
void write_trace_record(std::ostream& out, const TraceRecord& record);
void write_role_line(std::ostream& out, Time time, NodeId node, std::string_view role, NodeId head);

struct RoleLine {
  Time time = 0.0;
  NodeId node = kNoNode;
  std::string role;
  NodeId head = kNoNode;

  friend bool operator==(const RoleLine&, const RoleLine&) = default;
};

struct ParsedTrace {
  RunInfo info;
  std::vector<TraceRecord> records;
  std::vector<RoleLine> roles;
};

/// Throws ParseError carrying the 1-based line number.
ParsedTrace read_trace(std::istream& in);
ParsedTrace load_trace(const std::string& path);

/// Folds a parsed trace through a fresh MetricsCollector.
RunReport recompute(const ParsedTrace& trace);

/// Parses `text` as a double; the whole string must be consumed.
bool parse_double(std::string_view text, double& value);

}  // namespace manet::metrics
