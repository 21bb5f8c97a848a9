#pragma once

#include <limits>
#include <span>
#include <vector>

#include "ftrack/pattern.hpp"

namespace ftrack {

// One sampled row of every functional the run tracks. F[k-1] holds the
// generation-k sum (shocks weighted by xi); generations beyond k_max are
// aggregated into the last bucket. int_Lin and W are filled by the driver
// (they carry history the pattern alone does not have).
struct DiagRecord {
    double t = 0.0;
    long step_n = 0;
    EventKind kind = EventKind::Arrive;
    bool coalesced = false;
    double L = 0.0;
    double L_in = 0.0;
    double L_0out = 0.0;
    double L_Mout = 0.0;
    double L_xi = 0.0;
    double V = 0.0;
    std::vector<double> F;
    double tv_ln_u = 0.0;  // (1/2) TV ln u, from cell states
    double tv_v = 0.0;
    double osc_v = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    double mass = 0.0;      // Eulerian mass
    double momentum = 0.0;  // Eulerian momentum integral
    double int_Lin = 0.0;   // running time integral of L_in
    std::vector<double> W;  // per-probe crossing totals
};

// All functionals of the current pattern at weight xi. Strength sums are
// taken over the front ledgers; tv_ln_u / tv_v / osc_v / u extrema and the
// conservation integrals come from the cell states.
DiagRecord compute_diag(const WavePattern& p, double xi, int k_max);

// c(q) = (cosh q - 1)/(cosh q + 1).
double c_of_q(double q);

// Initial bulk q = (1/2) TV{ln rho0} + 1/(2 alpha) TV{v0} over the interior
// of the support (jumps to vacuum at the endpoints excluded).
double initial_bulk(std::span<const double> rho, std::span<const double> v, double alpha);

struct FlockingConstants {
    double q = 0.0;
    double c_q = 0.0;
    double xi_max = std::numeric_limits<double>::infinity();       // 1/c(q)
    double xi_sqrt_max = std::numeric_limits<double>::infinity();  // 1/sqrt(c(q))
    double T1 = 0.0;         // worst-case first-generation exit time
    double xi_bar = 1.0;     // min{ c^(-1/2), (M T1)^(-1/2) }
    double lambda = 0.0;     // (1 - xi_bar^2) M/2 + ln(xi_bar)/T1
    bool condition_holds = false;  // e^{2q} M^2 < alpha max{rho(a0+), rho(b0-)}
    bool rate_positive = false;    // M T1 < 1 and xi_bar > 1
};

// Flocking-decay constants from the initial datum (per-cell rho0, v0 on the
// support). M must equal the integral of rho0.
FlockingConstants flocking_constants(std::span<const double> rho, std::span<const double> v,
                                     double alpha, double total_mass);

// Vertical-trace probe at mass coordinate y: W accumulates |eps| of every
// front that crosses y, A is the current total size of waves approaching y.
// A front sitting exactly on the probe is charged when it leaves it.
struct ProbeTracker {
    double y = 0.0;
    double W = 0.0;
    double A = 0.0;

    void on_motion(const Motion& m);
    void refresh_approaching(const WavePattern& p);
};

// Apply one processed event to the tracker: charge the crossings recorded
// in the event's motions, then recompute the approaching sum.
void probe_update(ProbeTracker& tracker, const WavePattern& p, const EventRecord& record);

struct DecayFit {
    double C = 0.0;
    double lambda_hat = std::numeric_limits<double>::infinity();
    bool all_zero = false;  // flock already exact; lambda_hat is a sentinel
};

// Least-squares fit of ln(osc) vs t over samples with t >= t0 and osc > 0.
// Requires at least 10 such samples unless every sample is zero.
DecayFit fit_decay(std::span<const double> t, std::span<const double> osc, double t0);

} // namespace ftrack
