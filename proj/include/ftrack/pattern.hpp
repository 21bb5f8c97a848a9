#pragma once

#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "ftrack/riemann.hpp"

namespace ftrack {

enum class WaveKind { Shock, Rarefaction };
enum class FrontStatus { Active, StandbyLeft, StandbyRight };

inline WaveKind kind_of(double eps) {
    return eps < 0.0 ? WaveKind::Shock : WaveKind::Rarefaction;
}

// A single discontinuity of the piecewise-constant Lagrangian solution,
// travelling at a constant assigned speed between events.
struct Front {
    long id = 0;
    double y = 0.0;           // mass coordinate in [0, M]
    int family = 0;           // 1 or 2
    double eps = 0.0;         // signed strength; < 0 shock, > 0 rarefaction
    WaveKind kind = WaveKind::Shock;
    double speed = 0.0;
    int gen = 1;              // generation order, >= 1
    FrontStatus status = FrontStatus::Active;
    std::optional<double> exit_time;
    long stamp = 0;           // bumped whenever the trajectory changes
};

enum class EventKind { Interaction, BoundaryExit, TimeStep, Purge, Arrive };

// Spec-facing scheduled event (what next_event returns).
struct Event {
    double time = 0.0;
    EventKind kind = EventKind::Interaction;
    long front_a = 0, front_b = 0;  // interaction
    double y_star = 0.0;
    int side = 0;                   // boundary exit: 0 = y=0, 1 = y=M
    long front = 0;                 // boundary exit
    long step_n = 0;                // time step index
};

// Linear motion of one front between consecutive events; used for the
// probe functionals W_y.
struct Motion {
    long id = 0;
    double eps = 0.0;
    double y_from = 0.0;
    double y_to = 0.0;
};

// What actually happened when an event was processed, with everything the
// diagnostics monitor needs.
struct EventRecord {
    double time = 0.0;
    EventKind kind = EventKind::Interaction;
    bool same_family = false;
    bool coalesced = false;
    int family_a = 0, family_b = 0;   // incoming, a = left front
    double eps_a = 0.0, eps_b = 0.0;
    int gen_a = 0, gen_b = 0;
    int family_same = 0;              // family of the surviving wave
    double eps_same = 0.0;            // same-family outgoing strength
    double eps_refl = 0.0;            // reflected strength (0 when dropped)
    double y_star = 0.0;
    int side = 0;
    double eps_exit = 0.0;
    long step_n = 0;
    std::vector<Motion> motions;      // translations since the previous record
};

// The full piecewise-constant Lagrangian solution at time t.
// cells.size() == fronts.size() + 1; front positions are non-decreasing
// (ties occur transiently when several fronts are created at one point).
struct WavePattern {
    double t = 0.0;
    double alpha = 1.0;
    double M = 0.0;
    double eta = 0.0;

    // Simultaneity jitter: speed perturbation scale, in units of eta.
    double jitter_scale = 1e-9;

    // Coalescing of same-sign micro-fronts; threshold 0 disables it.
    // `coalesce_gap` is the prefactor multiplying (|s_a|+|s_b|) in the gap
    // test. Fronts below `purge_threshold` are removed outright: their
    // per-step reflections would fall below the zero-wave cutoff, and
    // repeatedly skipping those reflections corrupts the state next to them.
    double coalesce_threshold = 0.0;
    double coalesce_gap = 0.0;
    double purge_threshold = 0.0;

    std::vector<LagState> cells;
    std::vector<Front> fronts;
    std::vector<Front> standby_left;
    std::vector<Front> standby_right;
    double sum_out_left = 0.0;   // running |eps| totals of the ledgers
    double sum_out_right = 0.0;

    long next_id = 1;
    long next_seq = 1;
    long events_processed = 0;
    long event_cap = 2'000'000;

    struct QEntry {
        double time;
        long seq;
        int type;  // 0 collide (a,b adjacent), 1 exit left, 2 exit right
        long a, b;
        long stamp_a, stamp_b;
        bool operator>(const QEntry& o) const {
            return time != o.time ? time > o.time : seq > o.seq;
        }
    };
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> queue;
    std::unordered_map<long, int> index;  // front id -> position in `fronts`

    int find(long id) const {
        auto it = index.find(id);
        return it == index.end() ? -1 : it->second;
    }
    void rebuild_index() {
        index.clear();
        index.reserve(fronts.size() * 2);
        for (int i = 0; i < static_cast<int>(fronts.size()); ++i) index[fronts[i].id] = i;
    }

    double cell_width(int i) const {
        const double lo = i == 0 ? 0.0 : fronts[i - 1].y;
        const double hi = i == static_cast<int>(fronts.size()) ? M : fronts[i].y;
        return hi - lo;
    }

    // Max deviation of cells vs. strengths: ||cells[i+1] - lax(cells[i], front_i)||.
    double consistency_error() const;

    // Schedule helpers (lazy invalidation through stamps).
    void schedule_pair(int i);      // collision candidate for fronts i, i+1
    void schedule_exit(int i);      // boundary-exit candidate for front i
    void schedule_all();
    void bump(int i) { fronts[i].stamp = next_seq++; }
};

} // namespace ftrack
