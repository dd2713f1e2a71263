#include "manet/topology/mobility.hpp"

#include <algorithm>

namespace manet::topology {

namespace {

Position clamp_to(const Area& area, Position p) {
  p.x = std::clamp(p.x, 0.0, area.width);
  p.y = std::clamp(p.y, 0.0, area.height);
  return p;
}

}  // namespace

MobilityState make_mobility_state(Position start, Time now) {
  return MobilityState{start, start, 0.0, now};
}

MobilityState advance_mobility(MobilityState state, Time now, Time dt,
                               sim::RandomStream& stream, const Area& area,
                               const MobilityParams& params) {
  Time t = now;
  const Time end = now + dt;
  while (t < end) {
    if (state.current == state.waypoint) {
      // Arrived (or initial): wait out the pause, then pick the next leg.
      if (state.pause_until >= end) break;
      t = std::max(t, state.pause_until);
      state.waypoint = Position{stream.uniform(0.0, area.width),
                                stream.uniform(0.0, area.height)};
      state.speed = stream.uniform(params.speed_min, params.speed_max);
    }
    if (state.speed <= 0.0) break;

    const double remaining = distance(state.current, state.waypoint);
    const Time leg_time = remaining / state.speed;
    if (t + leg_time > end) {
      const double frac = (end - t) * state.speed / remaining;
      state.current = clamp_to(
          area, Position{state.current.x + frac * (state.waypoint.x - state.current.x),
                         state.current.y + frac * (state.waypoint.y - state.current.y)});
      break;
    }
    t += leg_time;
    state.current = state.waypoint;
    state.pause_until = t + params.pause;
  }
  return state;
}

}  // namespace manet::topology
