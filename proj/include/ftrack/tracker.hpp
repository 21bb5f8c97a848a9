#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ftrack/pattern.hpp"

namespace ftrack {

using EventSink = std::function<void(const WavePattern&, const EventRecord&)>;

// A piecewise-constant initial datum in Lagrangian coordinates: cell states
// with the mass widths of the cells (widths sum to M).
struct LagrangianData {
    std::vector<LagState> states;
    std::vector<double> widths;
};

// Strengths of the fan approximating a rarefaction of strength eps:
// N = floor(eps/eta) + 1 pieces of eps/N each, every piece < eta.
std::vector<double> split_rarefaction(double eps, double eta);

// Solve the Riemann problem at every breakpoint of the initial datum,
// split rarefactions, assign speeds and generation 1, schedule events.
WavePattern init_pattern(const LagrangianData& data, double alpha, double eta);

// Earliest pending collision/boundary exit with time <= t_stop, or nullopt.
// Detects >2-front simultaneity and breaks it by perturbing the
// later-created front's speed by jitter_scale * eta.
std::optional<Event> next_event(WavePattern& p, double t_stop);

// Resolve the collision of adjacent fronts ia, ia+1 at (y_star, t_star).
// Different families cross unchanged (exact swap); same family merge via
// the strength-form Riemann resolution, generations min / max+1.
EventRecord resolve_interaction(WavePattern& p, int ia, double y_star, double t_star);

// Absorb the outermost front at the boundary: it becomes a standby front
// with frozen strength, and the boundary cell takes the state beyond it.
EventRecord absorb_at_boundary(WavePattern& p, int side, double t_star);

// Merge adjacent same-family micro-fronts (both |eps| <= coalesce_threshold,
// gap <= coalesce_gap * (|s_a|+|s_b|)) by resolving their interaction early,
// placed at the forward-most incoming position. Emits one record per merge.
void coalesce_pass(WavePattern& p, const EventSink& sink);

// Advance to t_target (which must not cross a time step; the driver
// segments time), processing all events in order. Emits a record per event
// plus a final Arrive record carrying the trailing motions.
void advance(WavePattern& p, double t_target, const EventSink& sink);

} // namespace ftrack
