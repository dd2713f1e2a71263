#include "manet/topology/placement.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "manet/error.hpp"

namespace manet::topology {

std::vector<Position> parse_placement(std::istream& in, const Area& area) {
  std::map<long, Position> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long id = 0;
    Position p;
    if (!(fields >> id)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError(line_no, "placement line " + std::to_string(line_no) +
                                    ": expected `id x y`");
    }
    std::string extra;
    if (!(fields >> p.x >> p.y) || (fields >> extra)) {
      throw ParseError(line_no, "placement line " + std::to_string(line_no) +
                                    ": expected `id x y`");
    }
    if (id < 0 || by_id.contains(id)) {
      throw ParseError(line_no, "placement line " + std::to_string(line_no) +
                                    ": bad or duplicate node id");
    }
    if (!area.contains(p)) {
      throw ParseError(line_no, "placement line " + std::to_string(line_no) +
                                    ": position outside the area");
    }
    by_id.emplace(id, p);
  }
  std::vector<Position> out;
  out.reserve(by_id.size());
  for (const auto& [id, p] : by_id) {
    if (id != static_cast<long>(out.size())) {
      throw ParseError(line_no, "placement ids must be 0..n-1 without gaps");
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Position> load_placement(const std::string& path, const Area& area) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open placement file " + path);
  return parse_placement(in, area);
}

std::vector<Position> random_placement(std::size_t count, const Area& area,
                                       sim::RandomStream& stream) {
  std::vector<Position> out(count);
  for (auto& p : out) {
    p.x = stream.uniform(0.0, area.width);
    p.y = stream.uniform(0.0, area.height);
  }
  return out;
}

}  // namespace manet::topology
