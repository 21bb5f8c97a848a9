#pragma once

#include <vector>

#include "ftrack/tracker.hpp"

namespace ftrack {

// One front's outcome at a fractional step: the transmitted wave keeps the
// family and generation of the incoming one, the reflected wave takes the
// other family and generation + 1. Sign rules: eps_refl * eps_in < 0 and
// eps_same * eps_in > 0 for eps_in != 0, dt > 0.
struct SplitOutcome {
    double eps_in = 0.0;
    int family_in = 0;
    double eps_same = 0.0;
    double eps_refl = 0.0;  // exact solver value, kept even when the front is dropped
    int gen_same = 1;
    int gen_refl = 2;
};

// Sandwich constants of the reflected-wave estimate:
//   c1(q) <= |eps_refl| / (M dt |eps_in|) <= C1^+(q) or C1^-(q)
// with c1 = 1/(1+cosh q), C1^+ = 1/2 (eps_in > 0), C1^- = cosh(q)/2.
struct TimestepBounds {
    double c1 = 0.5;
    double C1_plus = 0.5;
    double C1_minus = 0.5;
};
TimestepBounds timestep_bounds(double q);

// v -> v (1 - M dt) on every cell; u and the standby ledgers untouched.
void damp_velocities(WavePattern& p, double total_mass, double dt);

// Unique root y of h(y) + h(x+y) = h(x)(1 - M s), bisected on the bracket
// (-x, 0) for x > 0 (mirrored for x < 0) down to bracket collapse. Test
// oracle for resolve_time_step; kept free of the production code path.
double implicit_split(double x, double s, double total_mass);

// The fractional step at t^n: damp all velocities, then re-solve every
// front into a transmitted and a reflected wave. Reflected fronts below the
// zero-wave threshold are not materialized (their outcome is still
// reported). No front crossings happen at t^n itself: all outgoing waves
// start at rest at their parent's position.
std::vector<SplitOutcome> resolve_time_step(WavePattern& p, double total_mass, double dt);

} // namespace ftrack
