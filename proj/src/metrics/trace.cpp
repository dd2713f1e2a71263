#include "manet/metrics/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "manet/error.hpp"

namespace manet::metrics {

namespace {

constexpr std::string_view kMagic = "# manet-trace v1";

void put_node(std::ostream& out, NodeId id) {
  if (id == kNoNode) {
    out << '-';
  } else {
    out << id;
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename Int>
bool parse_int(std::string_view text, Int& value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end && !text.empty();
}

class LineParser {
 public:
  explicit LineParser(std::size_t line) : line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(line_, "trace line " + std::to_string(line_) + ": " + what);
  }

  Time time(std::string_view text) const {
    double t = 0.0;
    if (!parse_double(text, t)) fail("bad time '" + std::string(text) + "'");
    return t;
  }

  NodeId node(std::string_view text) const {
    if (text == "-") return kNoNode;
    NodeId id = 0;
    if (!parse_int(text, id)) fail("bad node id '" + std::string(text) + "'");
    return id;
  }

  std::uint64_t u64(std::string_view text) const {
    std::uint64_t v = 0;
    if (!parse_int(text, v)) fail("bad integer '" + std::string(text) + "'");
    return v;
  }

  SourceRoute route(std::string_view text) const {
    SourceRoute r;
    if (text == "-") return r;
    for (auto part : split(text, ',')) r.push_back(node(part));
    return r;
  }

 private:
  std::size_t line_;
};

RunInfo parse_header(std::string_view line) {
  if (line.substr(0, kMagic.size()) != kMagic) {
    throw ParseError(1, "trace line 1: missing '# manet-trace v1' header");
  }
  RunInfo info;
  const LineParser p(1);
  for (auto field : split(line.substr(kMagic.size()), ' ')) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) p.fail("bad header field '" + std::string(field) + "'");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "protocol") {
      info.protocol = std::string(value);
    } else if (key == "seed") {
      info.seed = p.u64(value);
    } else if (key == "nodes") {
      info.nodes = static_cast<std::uint32_t>(p.u64(value));
    } else if (key == "sim_time") {
      info.sim_time = p.time(value);
    } else if (key == "periods") {
      info.periods = static_cast<std::uint32_t>(p.u64(value));
    } else {
      p.fail("unknown header field '" + std::string(key) + "'");
    }
  }
  if (info.periods == 0) p.fail("periods must be positive");
  return info;
}

}  // namespace

bool parse_double(std::string_view text, double& value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end && !text.empty();
}

void write_trace_header(std::ostream& out, const RunInfo& info) {
  out << kMagic << " protocol=" << info.protocol << " seed=" << info.seed
      << " nodes=" << info.nodes << " sim_time=" << format_double(info.sim_time)
      << " periods=" << info.periods << '\n';
}

void write_trace_record(std::ostream& out, const TraceRecord& r) {
  out << format_double(r.time) << '\t' << to_string(r.kind) << '\t';
  put_node(out, r.src);
  out << '\t';
  put_node(out, r.dst);
  out << '\t';
  if (r.route.empty()) {
    out << '-';
  } else {
    for (std::size_t i = 0; i < r.route.size(); ++i) out << (i ? "," : "") << r.route[i];
  }
  out << '\t';
  if (r.ttl) {
    out << *r.ttl;
  } else {
    out << '-';
  }
  out << '\t';
  put_node(out, r.node);
  out << '\t' << r.uid << '\t' << r.bits << '\n';
}

void write_role_line(std::ostream& out, Time time, NodeId node, std::string_view role, NodeId head) {
  out << format_double(time) << '\t' << node << '\t' << role << '\t';
  put_node(out, head);
  out << '\n';
}

ParsedTrace read_trace(std::istream& in) {
  ParsedTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "trace line 1: empty trace");
  trace.info = parse_header(line);
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const LineParser p(number);
    const auto f = split(line, '\t');
    if (f.size() == 4) {
      trace.roles.push_back(RoleLine{p.time(f[0]), p.node(f[1]), std::string(f[2]), p.node(f[3])});
      continue;
    }
    if (f.size() != 9) p.fail("expected 9 tab-separated fields, found " + std::to_string(f.size()));
    TraceRecord r;
    r.time = p.time(f[0]);
    const auto kind = trace_kind_from(f[1]);
    if (!kind) p.fail("unknown event kind '" + std::string(f[1]) + "'");
    r.kind = *kind;
    r.src = p.node(f[2]);
    r.dst = p.node(f[3]);
    r.route = p.route(f[4]);
    if (f[5] != "-") r.ttl = static_cast<std::uint32_t>(p.u64(f[5]));
    r.node = p.node(f[6]);
    r.uid = p.u64(f[7]);
    r.bits = p.u64(f[8]);
    trace.records.push_back(std::move(r));
  }
  return trace;
}

ParsedTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file " + path);
  return read_trace(in);
}

RunReport recompute(const ParsedTrace& trace) {
  MetricsCollector collector(trace.info);
  for (const auto& r : trace.records) collector.consume(r);
  return collector.finalize();
}

}  // namespace manet::metrics
