#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "manet/sim/random.hpp"
#include "manet/topology/geometry.hpp"

namespace manet::topology {

/// Reads `id x y` triples, one per line; `#` starts a comment. Ids must
/// cover 0..n-1 exactly once and every point must lie inside `area`.
/// Throws ParseError carrying the 1-based line number.
std::vector<Position> parse_placement(std::istream& in, const Area& area);
std::vector<Position> load_placement(const std::string& path, const Area& area);

/// Uniform placement in `area`.
std::vector<Position> random_placement(std::size_t count, const Area& area,
                                       sim::RandomStream& stream);

}  // namespace manet::topology
