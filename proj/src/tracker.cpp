#include "ftrack/tracker.hpp"

#include <algorithm>
#include <cmath>

namespace ftrack {

namespace {

constexpr double kSimulTol = 1e-12;

void reassign_speed(WavePattern& p, int i) {
    Front& f = p.fronts[i];
    f.speed = assigned_speed(f.family, f.eps, p.cells[i], p.cells[i + 1], p.alpha);
    p.bump(i);
}

void reschedule_around(WavePattern& p, int lo, int hi) {
    const int n = static_cast<int>(p.fronts.size());
    for (int i = std::max(0, lo - 1); i <= std::min(hi, n - 2); ++i) p.schedule_pair(i);
    for (int i = std::max(0, lo); i <= std::min(hi, n - 1); ++i) p.schedule_exit(i);
    if (n > 0) {
        p.schedule_exit(0);
        p.schedule_exit(n - 1);
    }
}

std::vector<Motion> translate_to(WavePattern& p, double t_new) {
    std::vector<Motion> motions;
    const double dt = t_new - p.t;
    if (dt <= 0.0) {
        p.t = std::max(p.t, t_new);
        return motions;
    }
    motions.reserve(p.fronts.size());
    double floor_y = 0.0;
    for (auto& f : p.fronts) {
        const double y0 = f.y;
        double y1 = y0 + f.speed * dt;
        y1 = std::clamp(y1, 0.0, p.M);
        y1 = std::max(y1, floor_y);  // ulp-level ordering guard
        floor_y = y1;
        if (y1 != y0) motions.push_back(Motion{f.id, f.eps, y0, y1});
        f.y = y1;
    }
    p.t = t_new;
    return motions;
}

double rarefaction_guard(const WavePattern& p, double eps) {
    if (eps > p.eta * (1.0 + 1e-9)) {
        throw InconsistentPattern("outgoing rarefaction exceeds eta: eps=" +
                                  std::to_string(eps) + " eta=" + std::to_string(p.eta));
    }
    return eps;
}

struct Popped {
    WavePattern::QEntry entry;
    int ia = -1;  // index of (left) front
};

// Pop the earliest still-valid queue entry with time <= t_stop. Detects
// three-front simultaneity among collisions and breaks it by slightly
// slowing the latest-created front involved.
std::optional<Popped> pop_next(WavePattern& p, double t_stop) {
    auto valid = [&](const WavePattern::QEntry& e, int& ia) -> bool {
        const int i = p.find(e.a);
        if (i < 0 || p.fronts[i].stamp != e.stamp_a) return false;
        if (e.type == 0) {
            const int j = p.find(e.b);
            if (j != i + 1 || p.fronts[j].stamp != e.stamp_b) return false;
        }
        ia = i;
        return true;
    };

    for (int guard = 0; guard < 1 << 16; ++guard) {
        std::optional<WavePattern::QEntry> first;
        int ia = -1;
        while (!p.queue.empty()) {
            const auto e = p.queue.top();
            if (valid(e, ia)) {
                first = e;
                break;
            }
            p.queue.pop();
        }
        if (!first || first->time > t_stop) return std::nullopt;
        p.queue.pop();

        // Deferred boundary exit: not yet outermost, blockers go first.
        if (first->type == 1 && ia != 0) {
            p.queue.push(WavePattern::QEntry{first->time, p.next_seq++, 1, first->a, 0, first->stamp_a, 0});
            continue;
        }
        if (first->type == 2 && ia != static_cast<int>(p.fronts.size()) - 1) {
            p.queue.push(WavePattern::QEntry{first->time, p.next_seq++, 2, first->a, 0, first->stamp_a, 0});
            continue;
        }

        if (first->type == 0) {
            // Look for a second collision at (numerically) the same time
            // sharing a front: three incoming fronts at one point.
            std::vector<WavePattern::QEntry> parked;
            bool perturbed = false;
            while (!p.queue.empty()) {
                auto e2 = p.queue.top();
                int ia2 = -1;
                if (!valid(e2, ia2)) {
                    p.queue.pop();
                    continue;
                }
                if (e2.time - first->time > kSimulTol) break;
                p.queue.pop();
                if (e2.type == 0 &&
                    (e2.a == first->a || e2.a == first->b || e2.b == first->a || e2.b == first->b)) {
                    p.queue.push(e2);  // revalidated via stamps after the perturbation
                    long worst = std::max({first->a, first->b, e2.a, e2.b});
                    const int wi = p.find(worst);
                    Front& w = p.fronts[wi];
                    const double delta = p.jitter_scale * p.eta;
                    w.speed -= delta * (w.speed > 0.0 ? 1.0 : -1.0);
                    p.bump(wi);
                    reschedule_around(p, wi - 1, wi + 1);
                    perturbed = true;
                    break;
                }
                parked.push_back(e2);
            }
            for (const auto& e2 : parked) p.queue.push(e2);
            if (perturbed) {
                p.queue.push(*first);  // revalidated on the next pass
                continue;
            }
        }
        return Popped{*first, ia};
    }
    throw InconsistentPattern("event queue failed to settle");
}

} // namespace

std::vector<double> split_rarefaction(double eps, double eta) {
    if (!(eps > 0.0)) throw NonPositiveInput("split_rarefaction: eps must be > 0");
    if (!(eta > 0.0)) throw NonPositiveInput("split_rarefaction: eta must be > 0");
    std::size_t n = static_cast<std::size_t>(std::floor(eps / eta)) + 1;
    while (!(eps / static_cast<double>(n) < eta)) ++n;
    return std::vector<double>(n, eps / static_cast<double>(n));
}

WavePattern init_pattern(const LagrangianData& data, double alpha, double eta) {
    if (data.states.size() != data.widths.size() || data.states.empty()) {
        throw EmptyDomain("init_pattern: malformed data");
    }
    double mass = 0.0;
    for (double w : data.widths) {
        if (!(w > 0.0)) throw EmptyDomain("init_pattern: cell widths must be positive");
        mass += w;
    }
    if (!(mass > 0.0)) throw EmptyDomain("init_pattern: M must be positive");
    for (const auto& s : data.states) {
        if (!(s.u > 0.0) || !std::isfinite(s.u) || !std::isfinite(s.v)) {
            throw NonPositiveVolume("init_pattern: invalid cell state");
        }
    }

    WavePattern p;
    p.alpha = alpha;
    p.eta = eta;
    p.M = mass;
    p.cells.push_back(data.states.front());

    auto emit = [&](double y, int family, double eps, const LagState& right, int& made) {
        const LagState& left = p.cells.back();
        Front f;
        f.id = p.next_id++;
        f.y = y;
        f.family = family;
        f.eps = eps;
        f.kind = kind_of(eps);
        f.gen = 1;
        f.speed = assigned_speed(family, eps, left, right, alpha);
        f.stamp = p.next_seq++;
        p.fronts.push_back(f);
        p.cells.push_back(right);
        ++made;
    };

    double y = 0.0;
    for (std::size_t k = 0; k + 1 < data.states.size(); ++k) {
        y += data.widths[k];
        const LagState& target = data.states[k + 1];
        const WaveSizes rs = solve_riemann(p.cells.back(), target, alpha);

        // Queue up (family, eps) pieces left-to-right, then anchor the last
        // cell to the exact input state.
        std::vector<std::pair<int, double>> pieces;
        for (int family : {1, 2}) {
            const double eps = family == 1 ? rs.eps1 : rs.eps2;
            if (eps == 0.0) continue;
            if (eps > 0.0) {
                for (double piece : split_rarefaction(eps, eta)) pieces.emplace_back(family, piece);
            } else {
                pieces.emplace_back(family, eps);
            }
        }
        int made = 0;
        for (std::size_t m = 0; m < pieces.size(); ++m) {
            const auto [family, eps] = pieces[m];
            const LagState right = m + 1 == pieces.size()
                                       ? target
                                       : lax_state(family, p.cells.back(), eps, alpha);
            emit(y, family, eps, right, made);
        }
        if (made == 0) {
            // States agree to within the zero-wave threshold; the breakpoint
            // dissolves and the previous cell continues.
            continue;
        }
    }

    p.rebuild_index();
    p.schedule_all();
    return p;
}

std::optional<Event> next_event(WavePattern& p, double t_stop) {
    auto popped = pop_next(p, t_stop);
    if (!popped) return std::nullopt;
    p.queue.push(popped->entry);  // leave the schedule as it was

    Event ev;
    ev.time = std::max(popped->entry.time, p.t);
    if (popped->entry.type == 0) {
        ev.kind = EventKind::Interaction;
        ev.front_a = popped->entry.a;
        ev.front_b = popped->entry.b;
        const Front& a = p.fronts[popped->ia];
        ev.y_star = a.y + a.speed * (ev.time - p.t);
    } else {
        ev.kind = EventKind::BoundaryExit;
        ev.front = popped->entry.a;
        ev.side = popped->entry.type == 1 ? 0 : 1;
    }
    return ev;
}

EventRecord resolve_interaction(WavePattern& p, int ia, double y_star, double t_star) {
    const int n = static_cast<int>(p.fronts.size());
    if (ia < 0 || ia + 1 >= n) throw NonAdjacentFronts("resolve_interaction: bad index");

    const Front a = p.fronts[ia];
    const Front b = p.fronts[ia + 1];

    EventRecord rec;
    rec.time = t_star;
    rec.kind = EventKind::Interaction;
    rec.y_star = y_star;
    rec.family_a = a.family;
    rec.family_b = b.family;
    rec.eps_a = a.eps;
    rec.eps_b = b.eps;
    rec.gen_a = a.gen;
    rec.gen_b = b.gen;
    rec.same_family = a.family == b.family;

    const LagState left = p.cells[ia];

    auto make_front = [&](int family, double eps, int gen) {
        Front f;
        f.id = p.next_id++;
        f.y = y_star;
        f.family = family;
        f.eps = eps;
        f.kind = kind_of(eps);
        f.gen = gen;
        f.stamp = p.next_seq++;
        return f;
    };

    if (!rec.same_family) {
        if (a.family != 2 || b.family != 1) {
            throw InconsistentPattern("different-family interaction with non-approaching order");
        }
        // Exact crossing: both strengths and generations are preserved.
        Front out1 = make_front(1, b.eps, b.gen);
        Front out2 = make_front(2, a.eps, a.gen);
        const LagState mid = lax_state(1, left, out1.eps, p.alpha);
        p.fronts[ia] = out1;
        p.fronts[ia + 1] = out2;
        p.cells[ia + 1] = mid;
        reassign_speed(p, ia);
        reassign_speed(p, ia + 1);
        rec.family_same = 0;
        rec.eps_same = 0.0;
        rec.eps_refl = 0.0;
    } else {
        const int family = a.family;
        const double strength_sum = a.eps + b.eps;  // tre-uno, exact
        const double w = wave_h(a.eps) + wave_h(b.eps);
        const WaveSizes out =
            family == 2 ? solve_strength_pair(strength_sum, w)
                        : solve_strength_pair(-strength_sum, w);
        const double eps_same = family == 2 ? out.eps2 : out.eps1;
        const double eps_refl = family == 2 ? out.eps1 : out.eps2;
        const int gen_same = std::min(a.gen, b.gen);
        const int gen_refl = std::max(a.gen, b.gen) + 1;
        rec.family_same = family;
        rec.eps_same = eps_same;
        rec.eps_refl = eps_refl;
        if (eps_same > 0.0) rarefaction_guard(p, eps_same);
        if (eps_refl > 0.0) rarefaction_guard(p, eps_refl);

        std::vector<Front> outgoing;
        if (family == 2) {
            if (eps_refl != 0.0) outgoing.push_back(make_front(1, eps_refl, gen_refl));
            if (eps_same != 0.0) outgoing.push_back(make_front(2, eps_same, gen_same));
        } else {
            if (eps_same != 0.0) outgoing.push_back(make_front(1, eps_same, gen_same));
            if (eps_refl != 0.0) outgoing.push_back(make_front(2, eps_refl, gen_refl));
        }

        p.fronts.erase(p.fronts.begin() + ia, p.fronts.begin() + ia + 2);
        if (outgoing.size() == 2) {
            // A pair is always (1-wave, 2-wave); the middle sits between them.
            p.cells[ia + 1] = lax_state(1, left, outgoing[0].eps, p.alpha);
        } else {
            p.cells.erase(p.cells.begin() + ia + 1,
                          p.cells.begin() + ia + 1 + (outgoing.empty() ? 2 : 1));
        }
        p.fronts.insert(p.fronts.begin() + ia, outgoing.begin(), outgoing.end());
        for (std::size_t m = 0; m < outgoing.size(); ++m) reassign_speed(p, ia + static_cast<int>(m));
    }

    p.rebuild_index();
    reschedule_around(p, ia - 1, ia + 2);
    return rec;
}

EventRecord absorb_at_boundary(WavePattern& p, int side, double t_star) {
    if (p.fronts.empty()) throw NotAtBoundary("absorb_at_boundary: no fronts");
    const double tol = 1e-6 * std::max(1.0, p.M);
    if (side == 0 ? p.fronts.front().y > tol : p.M - p.fronts.back().y > tol) {
        throw NotAtBoundary("absorb_at_boundary: outermost front is not at the boundary");
    }
    EventRecord rec;
    rec.time = t_star;
    rec.kind = EventKind::BoundaryExit;
    rec.side = side;
    if (side == 0) {
        Front f = p.fronts.front();
        f.status = FrontStatus::StandbyLeft;
        f.exit_time = t_star;
        f.y = 0.0;
        p.standby_left.push_back(f);
        p.sum_out_left += std::fabs(f.eps);
        rec.eps_exit = f.eps;
        rec.family_a = f.family;
        rec.gen_a = f.gen;
        p.fronts.erase(p.fronts.begin());
        p.cells.erase(p.cells.begin());
    } else {
        Front f = p.fronts.back();
        f.status = FrontStatus::StandbyRight;
        f.exit_time = t_star;
        f.y = p.M;
        p.standby_right.push_back(f);
        p.sum_out_right += std::fabs(f.eps);
        rec.eps_exit = f.eps;
        rec.family_a = f.family;
        rec.gen_a = f.gen;
        p.fronts.pop_back();
        p.cells.pop_back();
    }
    p.rebuild_index();
    if (!p.fronts.empty()) {
        p.schedule_exit(0);
        p.schedule_exit(static_cast<int>(p.fronts.size()) - 1);
    }
    return rec;
}

void coalesce_pass(WavePattern& p, const EventSink& sink) {
    // Retire sub-threshold fronts by sweeping them instantly to the boundary
    // they were headed to. The swept cells are shifted by the front's own
    // jump (u scaled, v translated), which commutes with every other
    // front's wave relation, so the state/strength consistency stays exact
    // and the strength lands in the standby ledger like a real exit.
    if (p.purge_threshold > 0.0) {
        for (int i = 0; i < static_cast<int>(p.fronts.size());) {
            if (std::fabs(p.fronts[i].eps) >= p.purge_threshold) {
                ++i;
                continue;
            }
            Front f = p.fronts[i];
            EventRecord rec;
            rec.time = p.t;
            rec.kind = EventKind::Purge;
            rec.family_a = f.family;
            rec.eps_a = f.eps;
            rec.gen_a = f.gen;
            rec.y_star = f.y;
            rec.side = f.family == 1 ? 0 : 1;
            rec.eps_exit = f.eps;
            rec.motions.push_back(Motion{f.id, f.eps, f.y, f.family == 1 ? 0.0 : p.M});
            f.exit_time = p.t;
            if (f.family == 1) {
                const double factor = p.cells[i + 1].u / p.cells[i].u;
                const double shift = p.cells[i + 1].v - p.cells[i].v;
                for (int k = 0; k < i; ++k) {
                    p.cells[k].u *= factor;
                    p.cells[k].v += shift;
                }
                p.cells.erase(p.cells.begin() + i);
                f.status = FrontStatus::StandbyLeft;
                f.y = 0.0;
                p.standby_left.push_back(f);
                p.sum_out_left += std::fabs(f.eps);
            } else {
                const double factor = p.cells[i].u / p.cells[i + 1].u;
                const double shift = p.cells[i].v - p.cells[i + 1].v;
                for (int k = i + 2; k < static_cast<int>(p.cells.size()); ++k) {
                    p.cells[k].u *= factor;
                    p.cells[k].v += shift;
                }
                p.cells.erase(p.cells.begin() + i + 1);
                f.status = FrontStatus::StandbyRight;
                f.y = p.M;
                p.standby_right.push_back(f);
                p.sum_out_right += std::fabs(f.eps);
            }
            p.fronts.erase(p.fronts.begin() + i);
            p.rebuild_index();
            reschedule_around(p, i - 1, i);
            if (++p.events_processed > p.event_cap) throw EventCapExceeded("event cap exceeded");
            if (sink) sink(p, rec);
        }
    }

    if (!(p.coalesce_threshold > 0.0)) return;
    int i = 0;
    while (i + 1 < static_cast<int>(p.fronts.size())) {
        const Front& a = p.fronts[i];
        const Front& b = p.fronts[i + 1];
        // Same-sign pairs aggregate with Delta L = 0; opposite signs may
        // only be resolved early when the pair is converging, i.e. when the
        // same cancellation would happen naturally a moment later.
        const bool signs_ok = a.eps * b.eps > 0.0 || a.speed > b.speed;
        const bool candidates =
            a.family == b.family && signs_ok &&
            std::fabs(a.eps) <= p.coalesce_threshold &&
            std::fabs(b.eps) <= p.coalesce_threshold &&
            (b.y - a.y) <= p.coalesce_gap * (std::fabs(a.speed) + std::fabs(b.speed)) &&
            !(a.eps > 0.0 && b.eps > 0.0 && a.eps + b.eps > 0.95 * p.eta);
        if (!candidates) {
            ++i;
            continue;
        }
        const double y_star = a.family == 1 ? a.y : b.y;
        std::vector<Motion> motions;
        if (a.y != y_star) motions.push_back(Motion{a.id, a.eps, a.y, y_star});
        if (b.y != y_star) motions.push_back(Motion{b.id, b.eps, b.y, y_star});
        EventRecord rec = resolve_interaction(p, i, y_star, p.t);
        rec.coalesced = true;
        rec.motions = std::move(motions);
        if (++p.events_processed > p.event_cap) throw EventCapExceeded("event cap exceeded");
        if (sink) sink(p, rec);
        i = std::max(0, i - 1);
    }
}

void advance(WavePattern& p, double t_target, const EventSink& sink) {
    if (t_target < p.t - 1e-12) throw InconsistentPattern("advance: t_target in the past");
    while (auto popped = pop_next(p, t_target)) {
        const double t_e = std::max(popped->entry.time, p.t);
        std::vector<Motion> motions = translate_to(p, t_e);
        EventRecord rec;
        if (popped->entry.type == 0) {
            const int ia = popped->ia;
            const double y_star = 0.5 * (p.fronts[ia].y + p.fronts[ia + 1].y);
            p.fronts[ia].y = p.fronts[ia + 1].y = y_star;
            rec = resolve_interaction(p, ia, y_star, t_e);
        } else {
            rec = absorb_at_boundary(p, popped->entry.type == 1 ? 0 : 1, t_e);
        }
        rec.motions = std::move(motions);
        if (++p.events_processed > p.event_cap) throw EventCapExceeded("event cap exceeded");
        if (sink) sink(p, rec);
        if (rec.kind == EventKind::Interaction) coalesce_pass(p, sink);
    }
    std::vector<Motion> tail = translate_to(p, t_target);
    if (!tail.empty() && sink) {
        EventRecord rec;
        rec.time = t_target;
        rec.kind = EventKind::Arrive;
        rec.motions = std::move(tail);
        sink(p, rec);
    }
    p.t = t_target;
}

} // namespace ftrack
