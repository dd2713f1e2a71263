#pragma once

#include "manet/sim/random.hpp"
#include "manet/topology/geometry.hpp"
#include "manet/types.hpp"

namespace manet::topology {

/// Random-waypoint parameters. speed_max == 0 gives a static scenario.
struct MobilityParams {
  double speed_min = 1.0;  // m/s
  double speed_max = 5.0;
  Time pause = 2.0;        // s
};

struct MobilityState {
  Position current;
  Position waypoint;
  double speed = 0.0;
  Time pause_until = 0.0;
};

/// Initial state: at `start`, paused until `now`, so the first advance draws
/// a fresh waypoint and speed.
MobilityState make_mobility_state(Position start, Time now);

/// Random-waypoint step over [now, now + dt]. The node moves toward its
/// waypoint at constant speed; on arrival it pauses for params.pause, then
/// draws a uniform waypoint in `area` and a uniform speed in
/// [speed_min, speed_max]. Repeats as often as dt allows.
MobilityState advance_mobility(MobilityState state, Time now, Time dt,
                               sim::RandomStream& stream, const Area& area,
                               const MobilityParams& params);

}  // namespace manet::topology
