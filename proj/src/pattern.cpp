#include "ftrack/pattern.hpp"

#include <algorithm>
#include <cmath>

namespace ftrack {

double WavePattern::consistency_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < fronts.size(); ++i) {
        const LagState rec = lax_state(fronts[i].family, cells[i], fronts[i].eps, alpha);
        const double du = std::fabs(rec.u - cells[i + 1].u) / std::max(1.0, std::fabs(cells[i + 1].u));
        const double dv = std::fabs(rec.v - cells[i + 1].v) / std::max(1.0, std::fabs(cells[i + 1].v));
        worst = std::max({worst, du, dv});
    }
    return worst;
}

void WavePattern::schedule_pair(int i) {
    if (i < 0 || i + 1 >= static_cast<int>(fronts.size())) return;
    const Front& a = fronts[i];
    const Front& b = fronts[i + 1];
    if (!(a.speed > b.speed)) return;
    const double gap = std::max(0.0, b.y - a.y);
    const double tc = t + gap / (a.speed - b.speed);
    queue.push(QEntry{tc, next_seq++, 0, a.id, b.id, a.stamp, b.stamp});
}

void WavePattern::schedule_exit(int i) {
    if (i < 0 || i >= static_cast<int>(fronts.size())) return;
    const Front& f = fronts[i];
    if (f.speed < 0.0) {
        const double te = t + std::max(0.0, f.y) / (-f.speed);
        queue.push(QEntry{te, next_seq++, 1, f.id, 0, f.stamp, 0});
    } else if (f.speed > 0.0) {
        const double te = t + std::max(0.0, M - f.y) / f.speed;
        queue.push(QEntry{te, next_seq++, 2, f.id, 0, f.stamp, 0});
    }
}

void WavePattern::schedule_all() {
    queue = {};
    for (int i = 0; i + 1 < static_cast<int>(fronts.size()); ++i) schedule_pair(i);
    for (int i = 0; i < static_cast<int>(fronts.size()); ++i) schedule_exit(i);
}

} // namespace ftrack
