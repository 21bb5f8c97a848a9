#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ftrack/euler.hpp"
#include "ftrack/functionals.hpp"
#include "ftrack/initial_data.hpp"
#include "ftrack/splitting.hpp"

namespace ftrack {

struct SimConfig {
    double alpha = 1.0;
    int nu = 4;
    std::optional<double> dt_override;
    std::optional<double> eta_override;
    std::optional<double> xi_override;
    double t_end = 8.0;
    int k_max = 32;
    std::vector<double> probes;  // empty -> {M/4, M/2, 3M/4}
    double sample_dt = 0.0625;
    std::string out_dir;  // empty -> no files written
    long event_cap = 2'000'000;
    bool deshift = false;
    double jitter_scale = 1e-9;
    bool coalesce = true;
    bool check_flocking = false;
    bool store_profiles = false;
};

// Config validated against a (normalized) datum, with all derived
// quantities the run and its monitor need.
struct ResolvedConfig {
    SimConfig cfg;
    double dt = 0.0;
    double eta = 0.0;
    double xi_mono = 1.0;  // weight for the L_xi monotonicity checks (1/c(q))
    double xi_gen = 1.0;   // weight for F_k / V (c(q)^{-1/2})
    double q = 0.0;
    double M = 0.0;
    double c_q = 0.0;
    double u_inf = 0.0;
    double u_sup = 0.0;
    TimestepBounds tsb;
    FlockingConstants fc;
    std::vector<double> probes;
};

// Fill dt/eta/xi defaults (dt = 2^-nu, eta = max(8 C1^- M q, 1/8) 2^-nu) and
// reject configurations violating M dt < 1, C1^-(q) M dt q <= eta, or the
// xi range. Throws ConfigRejected.
ResolvedConfig resolve_config(SimConfig cfg, const InitialData& normalized);

// One online check: how often an inequality failed and by how much.
struct CheckStat {
    long violations = 0;
    long checks = 0;
    double worst = 0.0;  // most positive excess seen (<= 0 means clean)
    void observe(double excess) {
        ++checks;
        worst = std::max(worst, excess);
        if (excess > 0.0) ++violations;
    }
};

struct MonitorReport {
    CheckStat l_event;           // Delta L at interactions/exits/coalesces
    CheckStat l_step;            // |Delta L| at time steps
    CheckStat lin_boundary;      // Delta L_in + |eps| at exits
    CheckStat lxi_event;         // Delta L_xi + (xi-1)|refl|, same family
    CheckStat lxi_step;          // Delta L_xi - (M/2) dt (xi-1) L_in
    CheckStat tre_uno;           // strength identity at same-family events
    CheckStat tre_due;           // h identity at same-family events
    CheckStat interaction_signs; // Lemma 2.9(a)/(b) structure
    CheckStat raref_cap;         // rarefactions stay <= eta
    CheckStat split_signs;       // Prop 2.4(b)
    CheckStat split_conservation;// ||same|+|refl|-|in|| at splits
    CheckStat sandwich;          // Prop 2.5 bounds
    CheckStat cross_check;       // resolve_time_step vs implicit_split
    CheckStat momentum_recursion;
    CheckStat momentum_drift;    // between steps, frozen rate constant
    CheckStat v_bound;           // Lemma 4.2 geometric bound
    CheckStat mass_error;
    CheckStat u_confine;
    CheckStat tv_v_bound;
    CheckStat lin_identity;      // L_in vs (1/2) TV ln u
    CheckStat consistency;
    CheckStat w_bound;           // W_y <= C1~ L_in(0) + C2~ M int L_in
    CheckStat w_boundary;        // W_0 + W_M <= L_in(0)
    CheckStat l_le_q;
    CheckStat v0_stability;
    CheckStat support_length;
    CheckStat gen_extinction;    // no gen-k front survives past k T1

    long total_violations() const;
};

// Breakpoints/values of u(., t); kept for inter-nu L1 distances.
struct UProfile {
    double t = 0.0;
    std::vector<double> y;
    std::vector<double> u;
};

struct RunResult {
    ResolvedConfig rc;
    InitialData data;  // normalized
    std::vector<DiagRecord> samples;
    std::vector<DiagRecord> step_pre;
    std::vector<DiagRecord> step_post;
    std::vector<EulerianFrame> frames;
    std::vector<UProfile> profiles;
    MonitorReport monitor;
    long events_interaction = 0;
    long events_coalesce = 0;
    long events_boundary = 0;
    long events_purge = 0;
    long steps = 0;
    long splits = 0;
    double L0 = 0.0;  // L(0+)
    double V0 = 0.0;  // V(0+)
    double max_rh_residual = 0.0;
    double sup_momentum_tail = 0.0;  // sup |momentum| over samples with t >= 5
    DecayFit fit;
    bool fit_valid = false;
    double wall_ms = 0.0;
    int exit_code = 0;  // 0 ok, 3 event cap, 4 invariant violation
    std::string error;
};

// Normalize the datum, resolve the config, run the nu-indexed loop with
// online diagnostics, optionally writing diag.csv / frames.jsonl /
// report.json into cfg.out_dir. Deterministic for identical inputs.
RunResult run(const SimConfig& cfg, const InitialData& raw);

struct SweepResult {
    std::vector<RunResult> runs;
    std::vector<double> etas;
    std::vector<double> max_residuals;
    std::vector<double> sup_momenta;
    double residual_slope = 0.0;  // d ln(max residual) / d ln(eta)
    double momentum_slope = 0.0;
    std::vector<double> l1_u_distance;  // consecutive-nu pairs
    int exit_code = 0;
};

// Run every nu concurrently (independent patterns, nothing shared) and
// aggregate scaling diagnostics.
SweepResult sweep(const SimConfig& base, const InitialData& raw, const std::vector<int>& nus);

// L1 distance of two piecewise-constant profiles on (0, M).
double l1_profile_distance(const UProfile& a, const UProfile& b, double M);

std::string report_json(const RunResult& rr);
std::string sweep_report_json(const SweepResult& sr);

} // namespace ftrack
