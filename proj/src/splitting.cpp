#include "ftrack/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ftrack {

TimestepBounds timestep_bounds(double q) {
    if (!(q >= 0.0)) throw NonPositiveInput("timestep_bounds: q must be >= 0");
    TimestepBounds b;
    b.c1 = 1.0 / (1.0 + std::cosh(q));
    b.C1_plus = 0.5;
    b.C1_minus = 0.5 * std::cosh(q);
    return b;
}

void damp_velocities(WavePattern& p, double total_mass, double dt) {
    const double factor = 1.0 - total_mass * dt;
    if (!(factor > 0.0)) throw TimeStepTooLarge("damp_velocities: M*dt >= 1");
    if (dt == 0.0) return;
    for (auto& c : p.cells) c.v *= factor;
}

double implicit_split(double x, double s, double total_mass) {
    const double ms = total_mass * s;
    if (!(ms >= 0.0) || !(ms < 1.0)) throw TimeStepTooLarge("implicit_split: need 0 <= M*s < 1");
    if (x == 0.0 || s == 0.0) return 0.0;

    const double rhs = wave_h(x) * (1.0 - ms);
    const auto F = [&](double y) { return wave_h(y) + wave_h(x + y) - rhs; };

    // -x < y < 0 for x > 0 (mirrored for x < 0); F is increasing in y.
    double lo = x > 0.0 ? -x : 0.0;
    double hi = x > 0.0 ? 0.0 : -x;
    if (!(F(lo) <= 0.0 && F(hi) >= 0.0)) {
        throw BracketFailure("implicit_split: bracket does not straddle the root");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (F(mid) > 0.0) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<SplitOutcome> resolve_time_step(WavePattern& p, double total_mass, double dt) {
    damp_velocities(p, total_mass, dt);

    std::vector<SplitOutcome> outcomes;
    outcomes.reserve(p.fronts.size());
    if (p.fronts.empty() || dt == 0.0) {
        for (const auto& f : p.fronts) {
            outcomes.push_back(SplitOutcome{f.eps, f.family, f.eps, 0.0, f.gen, f.gen + 1});
        }
        return outcomes;
    }

    const double factor = 1.0 - total_mass * dt;
    std::vector<Front> fronts;
    std::vector<LagState> cells;
    fronts.reserve(p.fronts.size() * 2);
    cells.reserve(p.cells.size() * 2);
    cells.push_back(p.cells.front());

    for (std::size_t i = 0; i < p.fronts.size(); ++i) {
        const Front in = p.fronts[i];
        const LagState& left = cells.back();
        const LagState& right = p.cells[i + 1];

        // Strength-form split: eps2+ - eps1+ = eps_in for a 2-wave (mirrored
        // for a 1-wave), h(eps1+) + h(eps2+) = h(eps_in)(1 - M dt). Anchoring
        // the equation to the stored strength keeps eq. "one-timestep" exact.
        const double w = wave_h(in.eps) * factor;
        double eps_same, eps_refl;
        if (in.family == 2) {
            eps_refl = solve_strength_root(in.eps, w);
            eps_same = in.eps + eps_refl;
        } else {
            eps_same = solve_strength_root(-in.eps, w);
            eps_refl = eps_same - in.eps;
        }

        SplitOutcome oc;
        oc.eps_in = in.eps;
        oc.family_in = in.family;
        oc.eps_same = eps_same;
        oc.eps_refl = eps_refl;
        oc.gen_same = in.gen;
        oc.gen_refl = in.gen + 1;
        outcomes.push_back(oc);

        auto push_front = [&](int family, double eps, int gen, const LagState& rstate) {
            Front f;
            f.id = p.next_id++;
            f.y = in.y;
            f.family = family;
            f.eps = eps;
            f.kind = kind_of(eps);
            f.gen = gen;
            f.speed = assigned_speed(family, eps, cells.back(), rstate, p.alpha);
            f.stamp = p.next_seq++;
            fronts.push_back(f);
            cells.push_back(rstate);
        };

        // Sub-threshold reflections are not materialized; the transmitted
        // wave then keeps the incoming strength bit-exactly.
        const bool keep_refl = std::fabs(eps_refl) >= kZeroWave;
        if (!keep_refl) {
            push_front(in.family, in.eps, in.gen, right);
        } else if (in.family == 2) {
            push_front(1, eps_refl, in.gen + 1, lax_state(1, left, eps_refl, p.alpha));
            push_front(2, eps_same, in.gen, right);
        } else {
            push_front(1, eps_same, in.gen, lax_state(1, left, eps_same, p.alpha));
            push_front(2, eps_refl, in.gen + 1, right);
        }
    }

    p.fronts = std::move(fronts);
    p.cells = std::move(cells);
    p.rebuild_index();
    p.schedule_all();
    return outcomes;
}

} // namespace ftrack
