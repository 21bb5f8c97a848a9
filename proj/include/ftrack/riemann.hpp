#pragma once

#include <cmath>

#include "ftrack/errors.hpp"

namespace ftrack {

// Constant state in Lagrangian mass coordinates: specific volume u = 1/rho
// (strictly positive) and velocity v.
struct LagState {
    double u = 1.0;
    double v = 0.0;
};

// Outcome of a Riemann problem: signed strengths of the 1- and 2-wave and
// the intermediate state between them. eps < 0 is a shock, eps > 0 a
// rarefaction, eps == 0 no wave of that family.
struct WaveSizes {
    double eps1 = 0.0;
    double eps2 = 0.0;
    LagState middle;
};

// Waves with |eps| below this are emitted as "no wave" so zero-strength
// fronts never enter the event queue.
inline constexpr double kZeroWave = 1e-14;

// h(eps) = eps for eps >= 0, sinh(eps) for eps < 0. Odd-signed: h(x)*x >= 0
// and |x| <= |h(x)|.
inline double wave_h(double eps) {
    return eps >= 0.0 ? eps : std::sinh(eps);
}

inline double wave_h_prime(double eps) {
    return eps >= 0.0 ? 1.0 : std::cosh(eps);
}

// State reached from `left` along the family-j wave curve at parameter eps:
//   family 1: u = u_l * exp(+2 eps),  family 2: u = u_l * exp(-2 eps),
//   v = v_l + 2 alpha h(eps).
LagState lax_state(int family, const LagState& left, double eps, double alpha);

// Root e of h(e) + h(e + d) = w, found by a safeguarded bracketed Newton
// iteration refined to bracket collapse (residual well below 1e-13). No
// zero-wave snapping.
double solve_strength_root(double d, double w);

// Strengths of the two outgoing waves for the jump with u-ratio parameter
// d = (1/2) ln(u_l / u_r) and scaled velocity jump w = (v_r - v_l)/(2 alpha).
// This is the scalar reduction of the Riemann problem: eps2 = eps1 + d
// exactly, and eps1 solves h(eps1) + h(eps1 + d) = w. Waves below the
// zero-wave threshold are snapped to zero with the whole jump put on the
// other family so eps2 - eps1 = d stays exact.
WaveSizes solve_strength_pair(double d, double w);

// Riemann solver for the homogeneous p-system with p = alpha^2 rho.
// The returned strengths satisfy
//   eps2 - eps1 = (1/2) ln(u_l/u_r)                  (exact)
//   h(eps1) + h(eps2) = (v_r - v_l)/(2 alpha)        (residual <= 1e-13)
//   |eps1| + |eps2| <= max{(1/2)|ln(u_r/u_l)|, |v_r - v_l|/(2 alpha)}.
WaveSizes solve_riemann(const LagState& left, const LagState& right, double alpha);

// Shock propagation speed: magnitude alpha / sqrt(u_l u_r), negative for
// family 1, positive for family 2. Depends on the flanking u only.
double shock_speed(int family, double u_left, double u_right, double alpha);

// Characteristic speed -alpha/u (family 1) or +alpha/u (family 2).
double char_speed(int family, const LagState& state, double alpha);

// Speed assigned to a front by the construction: exact Rankine-Hugoniot
// speed for shocks, characteristic speed of the right state for
// rarefaction fronts.
double assigned_speed(int family, double eps, const LagState& left,
                      const LagState& right, double alpha);

} // namespace ftrack
