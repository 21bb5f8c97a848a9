#include "ftrack/euler.hpp"

#include <algorithm>
#include <cmath>

namespace ftrack {

BoundaryTrace BoundaryTrace::start(const WavePattern& p) {
    BoundaryTrace tr;
    tr.t_last = p.t;
    tr.segments.push_back(Segment{p.t, p.cells.front().v, p.cells.front().u,
                                  p.cells.back().v, p.cells.back().u});
    return tr;
}

void BoundaryTrace::advance_to(double t) {
    if (t <= t_last) return;
    const double x = segments.back().v0 * (t - t_last) - comp;
    const double s = integral_v0 + x;
    comp = (s - integral_v0) - x;
    integral_v0 = s;
    t_last = t;
}

void BoundaryTrace::sync(const WavePattern& p) {
    advance_to(p.t);
    const Segment& s = segments.back();
    const LagState& lo = p.cells.front();
    const LagState& hi = p.cells.back();
    if (s.v0 != lo.v || s.u0 != lo.u || s.vM != hi.v || s.uM != hi.u) {
        segments.push_back(Segment{p.t, lo.v, lo.u, hi.v, hi.u});
    }
}

void update_boundary_trace(BoundaryTrace& trace, const WavePattern& p, const EventRecord& record) {
    trace.advance_to(record.time);
    trace.sync(p);
}

EulerianFrame to_euler(const WavePattern& p, const BoundaryTrace& trace, double a0) {
    if (p.cells.size() != p.fronts.size() + 1) {
        throw InconsistentPattern("to_euler: cell/front count mismatch");
    }
    BoundaryTrace t2 = trace;  // integrate up to the frame time if needed
    t2.advance_to(p.t);

    EulerianFrame fr;
    fr.t = p.t;
    fr.a = a0 + t2.integral_v0;

    const std::size_t n = p.fronts.size();
    fr.x.reserve(n + 2);
    fr.widths.reserve(n + 1);
    fr.cells.reserve(n + 1);
    fr.x.push_back(fr.a);
    double xc = fr.a, xcomp = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const LagState& c = p.cells[i];
        const double lo = i == 0 ? 0.0 : p.fronts[i - 1].y;
        const double hi = i == n ? p.M : p.fronts[i].y;
        const double w = c.u * (hi - lo);
        fr.widths.push_back(w);
        const double rho = 1.0 / c.u;
        fr.cells.push_back(EulerCell{rho, c.v, rho * c.v});
        const double y = w - xcomp;
        const double s = xc + y;
        xcomp = (s - xc) - y;
        xc = s;
        fr.x.push_back(xc);
    }
    fr.b = fr.x.back();

    // Discontinuity speeds of the reconstructed curves: x_j(t) = a(t) +
    // int_0^{y_j} u dy, so dx_j/dt = v(0+) - sum_{l<j} du_l s_l + u(y_j-) s_j.
    fr.rh_residual.assign(n + 2, 0.0);
    const double v0 = p.cells.front().v;
    {
        const double rho_r = fr.cells.front().rho;
        const double ratio = fr.cells.front().m / rho_r;  // vacuum on the left
        fr.rh_residual.front() = std::fabs(v0 - ratio);
    }
    double run = v0;  // v(0+) - sum du_l s_l over fronts left of the current one
    for (std::size_t f = 0; f < n; ++f) {
        const double u_left = p.cells[f].u;
        const double xprime = run + u_left * p.fronts[f].speed;
        const double drho = fr.cells[f + 1].rho - fr.cells[f].rho;
        const double dm = fr.cells[f + 1].m - fr.cells[f].m;
        if (drho == 0.0) {
            if (dm != 0.0) fr.degenerate_jump = true;
        } else {
            fr.rh_residual[f + 1] = std::fabs(xprime - dm / drho);
        }
        run -= (p.cells[f + 1].u - p.cells[f].u) * p.fronts[f].speed;
    }
    {
        const double vM = p.cells.back().v;
        const double rho_l = fr.cells.back().rho;
        const double ratio = (0.0 - fr.cells.back().m) / (0.0 - rho_l);
        fr.rh_residual.back() = std::fabs(vM - ratio);
    }
    return fr;
}

double momentum(const EulerianFrame& frame) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < frame.cells.size(); ++i) {
        const double x = frame.cells[i].m * frame.widths[i] - comp;
        const double s = sum + x;
        comp = (s - sum) - x;
        sum = s;
    }
    return sum;
}

double rh_residual_max(const EulerianFrame& frame) {
    if (frame.degenerate_jump) {
        throw DegenerateJump("rh_residual_max: interior contact-like jump");
    }
    double worst = 0.0;
    for (double r : frame.rh_residual) worst = std::max(worst, r);
    return worst;
}

} // namespace ftrack
