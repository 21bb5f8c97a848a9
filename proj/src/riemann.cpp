#include "ftrack/riemann.hpp"

#include <algorithm>
#include <limits>

namespace ftrack {

namespace {

void require_volume(double u) {
    if (!(u > 0.0) || !std::isfinite(u)) {
        throw NonPositiveVolume("specific volume must be positive and finite");
    }
}

void require_family(int family) {
    if (family != 1 && family != 2) {
        throw NonPositiveInput("family must be 1 or 2");
    }
}

} // namespace

LagState lax_state(int family, const LagState& left, double eps, double alpha) {
    require_family(family);
    require_volume(left.u);
    if (!(alpha > 0.0)) throw NonPositiveInput("alpha must be positive");
    const double sgn = family == 1 ? 2.0 : -2.0;
    return LagState{left.u * std::exp(sgn * eps), left.v + 2.0 * alpha * wave_h(eps)};
}

double solve_strength_root(double d, double w) {
    // g(e) = h(e) + h(e + d) - w is strictly increasing with g' >= 2.
    const auto g = [&](double e) { return wave_h(e) + wave_h(e + d) - w; };

    // Expand a bracket [lo, hi] with g(lo) <= 0 <= g(hi).
    double r = std::max({1.0, std::fabs(d), std::fabs(w)});
    double lo = -r, hi = r;
    for (int i = 0; i < 80 && g(lo) > 0.0; ++i) lo *= 2.0;
    for (int i = 0; i < 80 && g(hi) < 0.0; ++i) hi *= 2.0;
    if (g(lo) > 0.0 || g(hi) < 0.0) {
        throw BracketFailure("solve_strength_pair: bracket expansion failed");
    }

    // Newton from the midpoint, safeguarded by bisection. The bracket is
    // collapsed relative to the root's own scale so that even reflections
    // near the zero-wave threshold keep full relative accuracy (the Prop.
    // 2.5 sandwich is checked on every one of them).
    double e = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        const double ge = g(e);
        if (ge > 0.0) hi = e; else lo = e;
        const double width = hi - lo;
        if (width <= 2.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::fabs(lo), std::fabs(hi)) ||
            width <= std::numeric_limits<double>::denorm_min()) {
            break;
        }
        const double dg = wave_h_prime(e) + wave_h_prime(e + d);
        double next = e - ge / dg;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (next == e) break;
        e = next;
    }
    return e;
}

WaveSizes solve_strength_pair(double d, double w) {
    const double e = solve_strength_root(d, w);
    WaveSizes out;
    out.eps1 = e;
    out.eps2 = e + d;
    // Zero-wave policy; when one wave is snapped, the other absorbs the whole
    // jump so eps2 - eps1 = d stays exact.
    if (std::fabs(out.eps1) < kZeroWave) {
        out.eps1 = 0.0;
        out.eps2 = d;
    }
    if (std::fabs(out.eps2) < kZeroWave) {
        out.eps2 = 0.0;
        out.eps1 = -d;
        if (std::fabs(out.eps1) < kZeroWave) out.eps1 = 0.0;
    }
    return out;
}

WaveSizes solve_riemann(const LagState& left, const LagState& right, double alpha) {
    require_volume(left.u);
    require_volume(right.u);
    if (!(alpha > 0.0)) throw NonPositiveInput("alpha must be positive");

    const double d = 0.5 * std::log(left.u / right.u);
    const double w = (right.v - left.v) / (2.0 * alpha);
    WaveSizes out = solve_strength_pair(d, w);
    out.middle = lax_state(1, left, out.eps1, alpha);
    return out;
}

double shock_speed(int family, double u_left, double u_right, double alpha) {
    require_family(family);
    require_volume(u_left);
    require_volume(u_right);
    const double mag = alpha / std::sqrt(u_left * u_right);
    return family == 1 ? -mag : mag;
}

double char_speed(int family, const LagState& state, double alpha) {
    require_family(family);
    require_volume(state.u);
    return family == 1 ? -alpha / state.u : alpha / state.u;
}

double assigned_speed(int family, double eps, const LagState& left,
                      const LagState& right, double alpha) {
    if (eps < 0.0) return shock_speed(family, left.u, right.u, alpha);
    return char_speed(family, right, alpha);
}

} // namespace ftrack
