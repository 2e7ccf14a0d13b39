#pragma once

#include <vector>

#include "tpdsim/pulses.hpp"

namespace tpdsim {

// One fixed RK4 step inside a segment [a, b] that does not straddle any
// pulse-support edge. A uniform step whose stages cross a pulse turn-on or
// turn-off picks up an O(h) local error (the final stage evaluates the drive
// on the wrong side of the discontinuity), so the step list is built by
// splitting [t0, T] at every support edge and subdividing each piece.
struct Step {
  double t;  // step start
  double h;  // step size
  double a;  // segment start (for one-sided envelope evaluation)
  double b;  // segment end
};

std::vector<Step> segment_steps(const std::vector<const Pulse*>& pulses,
                                double t0, double t_end, double dt);

// Default step heuristic: resolve the fastest molecular rate and the fastest
// pulse bandwidth with 40 points per characteristic time.
double default_time_step(double max_molecular_rate,
                         const std::vector<const Pulse*>& pulses);

}  // namespace tpdsim
