#pragma once

#include <string>
#include <vector>

#include "ftrack/tracker.hpp"

namespace ftrack {

// Piecewise-constant Eulerian initial datum on [a0, b0]: per-cell length,
// density and velocity. rho must be uniformly positive on the support.
struct InitialData {
    double a0 = 0.0;
    double b0 = 0.0;
    std::vector<double> len;
    std::vector<double> rho;
    std::vector<double> v;
    double v_bar = 0.0;  // recorded shift applied by normalize()

    double total_mass() const;      // M = integral of rho
    double total_momentum() const;  // M1 = integral of rho v
    double u_tilde_0() const { return 1.0 / rho.front(); }
    double u_tilde_M() const { return 1.0 / rho.back(); }

    // Lagrangian cells (u, v) with mass widths rho_i len_i; exact for
    // piecewise-constant data.
    LagrangianData lagrangian() const;

    void validate() const;
};

// Parse + validate {a0, b0, cells:[{len, rho, v}...]}.
InitialData load_initial_data(const std::string& path);
InitialData parse_initial_data(const std::string& json_text);

// Shift velocities by -M1/M so the total momentum vanishes; the shift is
// recorded in v_bar for optional de-shifting of Eulerian output.
InitialData normalize(InitialData data);

// Canonical data sets used by the documentation and the acceptance suite:
//   constant            rho=2 on [0, 1/2], v=0
//   two-shock           single jump resolving into two shocks of size -1/2
//   shock-rarefaction   single jump resolving into a 1-shock and a 2-rarefaction
//   random-bv8          8 deterministic pseudo-random BV cells
//   flocking            rho = 2 + small perturbation on [0, 1/2] (q <= 0.05)
InitialData builtin_data(const std::string& name);

} // namespace ftrack
