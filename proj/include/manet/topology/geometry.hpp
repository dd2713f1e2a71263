#pragma once

#include <cmath>

namespace manet::topology {

struct Position {
  double x = 0.0;  // meters
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct Area {
  double width = 1000.0;  // meters
  double height = 1000.0;

  bool contains(const Position& p) const noexcept {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }
};

inline double distance_squared(const Position& a, const Position& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Position& a, const Position& b) noexcept {
  return std::sqrt(distance_squared(a, b));
}

}  // namespace manet::topology
