#pragma once

#include <vector>

#include "ftrack/pattern.hpp"

namespace ftrack {

// Piecewise-constant boundary traces u(0+), v(0+), u(M-), v(M-) plus the
// exactly-integrated int_0^t v(0+,s) ds that drives the free boundary a(t).
struct BoundaryTrace {
    struct Segment {
        double t_start = 0.0;
        double v0 = 0.0, u0 = 0.0;
        double vM = 0.0, uM = 0.0;
    };
    std::vector<Segment> segments;
    double t_last = 0.0;
    double integral_v0 = 0.0;
    double comp = 0.0;  // Kahan carry for the integral

    static BoundaryTrace start(const WavePattern& p);

    // Accumulate the integral up to t with the current v(0+).
    void advance_to(double t);

    // Append a new segment if either boundary cell changed.
    void sync(const WavePattern& p);
};

// Convenience wrapper matching the per-event update contract: advance the
// quadrature to the event time, then pick up any boundary-cell change.
void update_boundary_trace(BoundaryTrace& trace, const WavePattern& p, const EventRecord& record);

struct EulerCell {
    double rho = 0.0;
    double v = 0.0;
    double m = 0.0;  // rho * v
};

// Reconstructed Eulerian profile on [a, b]: x holds the discontinuity
// positions x_0 = a .. x_{N+1} = b; widths[i] = u_i * dy_i is the stable
// per-cell width used for the conservation integrals.
struct EulerianFrame {
    double t = 0.0;
    double a = 0.0;
    double b = 0.0;
    std::vector<double> x;
    std::vector<double> widths;
    std::vector<EulerCell> cells;
    std::vector<double> rh_residual;  // j = 0 .. N+1
    bool degenerate_jump = false;
};

// Exact change of variables from the Lagrangian pattern. Interior
// discontinuity speeds use the construction's own front speeds (upstream
// speed errors included: this is the curve the scheme actually draws);
// the boundary speeds are v(0+) and v(M-).
EulerianFrame to_euler(const WavePattern& p, const BoundaryTrace& trace, double a0);

// Total momentum integral sum_i rho_i v_i (x_{i+1} - x_i).
double momentum(const EulerianFrame& frame);

// Largest Rankine-Hugoniot residual |x'_j - Delta(rho v)/Delta rho|.
double rh_residual_max(const EulerianFrame& frame);

} // namespace ftrack
