#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace manet::queueing {

/// Arrival/service distribution codes.
enum class DistributionCode : std::uint8_t {
  M,   // Poisson process / exponential times
  E,   // Erlang
  G,   // general
  GI,  // general independent
};

/// Queue ranking rule.
enum class Ranking : std::uint8_t { FCFS, LCFS, PRI };

std::string_view to_string(DistributionCode code);
std::string_view to_string(Ranking ranking);

/// `[A/B/s]:{d/e/f}`. An empty optional is an infinite capacity or
/// calling population.
struct KendallSpec {
  DistributionCode arrival = DistributionCode::M;
  DistributionCode service = DistributionCode::M;
  std::uint32_t servers = 1;
  std::optional<std::uint64_t> capacity;
  std::optional<std::uint64_t> population;
  Ranking ranking = Ranking::FCFS;

  friend bool operator==(const KendallSpec&, const KendallSpec&) = default;
};

/// Strict parser for
///   `[` code `/` code `/` int `]` `:` `{` (int|inf) `/` (int|inf) `/` rule `}`
/// with codes M, E, G, GI; rules FCFS, LCFS, PRI; `inf` case-insensitive;
/// integers positive decimal. No whitespace is accepted.
/// Throws ParseError whose offset() is the byte offset of the first
/// offending character.
KendallSpec parse_kendall(std::string_view text);

/// Canonical text, e.g. `[M/M/1]:{inf/inf/FCFS}`.
std::string format_kendall(const KendallSpec& spec);

}  // namespace manet::queueing
