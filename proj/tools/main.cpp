#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftrack/driver.hpp"

namespace {

// "4..8" or "4,5,6"
std::vector<int> parse_nu_range(const std::string& s) {
    std::vector<int> nus;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(s.substr(0, dots));
        const int hi = std::stoi(s.substr(dots + 2));
        for (int nu = lo; nu <= hi; ++nu) nus.push_back(nu);
    } else {
        std::size_t pos = 0;
        while (pos < s.size()) {
            const auto comma = s.find(',', pos);
            nus.push_back(std::stoi(s.substr(pos, comma - pos)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    return nus;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Event-driven wave-front-tracking simulator for the 1-D isothermal "
        "Euler system with mean-velocity alignment damping (Lagrangian mass "
        "coordinates, absorbing boundaries, Eulerian free-boundary output)."};

    std::string data_path, builtin, out_dir = "out", sweep_range, seed_perturb;
    ftrack::SimConfig cfg;
    cfg.out_dir = "out";
    double dt = 0, eta = 0, xi = 0;
    std::string probes_arg;
    bool no_coalesce = false;

    app.add_option("--data", data_path, "Initial-data JSON file {a0,b0,cells:[{len,rho,v}...]}");
    app.add_option("--builtin", builtin,
                   "Built-in datum: constant | two-shock | shock-rarefaction | random-bv8 | flocking");
    app.add_option("--alpha", cfg.alpha, "Sound speed alpha > 0");
    app.add_option("--nu", cfg.nu, "Refinement index (dt = 2^-nu, eta = E 2^-nu)");
    app.add_option("--dt", dt, "Time step override");
    app.add_option("--eta", eta, "Rarefaction-size parameter override");
    app.add_option("--t-end", cfg.t_end, "Final time");
    app.add_option("--xi", xi, "Shock weight for L_xi (default 1/c(q))");
    app.add_option("--kmax", cfg.k_max, "Generation buckets for F_k (overflow aggregated)");
    app.add_option("--probes", probes_arg, "Probe positions y1,y2,... (default M/4,M/2,3M/4)");
    app.add_option("--sample-dt", cfg.sample_dt, "Uniform diagnostics/frame grid spacing");
    app.add_option("--out-dir", out_dir, "Output directory (diag.csv, frames.jsonl, report.json)");
    app.add_option("--event-cap", cfg.event_cap, "Abort after this many events (exit 3)");
    app.add_flag("--deshift", cfg.deshift, "Undo the mean-velocity shift in Eulerian output");
    app.add_option("--sweep", sweep_range, "Run a refinement sweep, e.g. 4..8 or 4,6,8");
    app.add_flag("--check-flocking", cfg.check_flocking, "Print the flocking report");
    app.add_option("--seed-perturb", cfg.jitter_scale,
                   "Simultaneity jitter scale (speed perturbation = scale * eta)");
    app.add_flag("--no-coalesce", no_coalesce, "Disable micro-front coalescing");

    CLI11_PARSE(app, argc, argv);

    try {
        if ((data_path.empty()) == (builtin.empty())) {
            std::fprintf(stderr, "error: exactly one of --data or --builtin is required\n");
            return 2;
        }
        if (dt > 0) cfg.dt_override = dt;
        if (eta > 0) cfg.eta_override = eta;
        if (xi > 0) cfg.xi_override = xi;
        if (!probes_arg.empty()) {
            std::size_t pos = 0;
            while (pos < probes_arg.size()) {
                const auto comma = probes_arg.find(',', pos);
                cfg.probes.push_back(std::stod(probes_arg.substr(pos, comma - pos)));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
        cfg.coalesce = !no_coalesce;
        cfg.out_dir = out_dir;

        const ftrack::InitialData data = builtin.empty()
                                             ? ftrack::load_initial_data(data_path)
                                             : ftrack::builtin_data(builtin);

        if (!sweep_range.empty()) {
            const auto nus = parse_nu_range(sweep_range);
            const auto sr = ftrack::sweep(cfg, data, nus);
            std::printf("sweep: %zu runs, residual slope %.3f, momentum slope %.3f\n",
                        sr.runs.size(), sr.residual_slope, sr.momentum_slope);
            for (const auto& r : sr.runs) {
                std::printf("  nu=%d eta=%.6g events=%ld violations=%ld exit=%d\n", r.rc.cfg.nu,
                            r.rc.eta, r.events_interaction + r.events_coalesce + r.events_boundary,
                            r.monitor.total_violations(), r.exit_code);
            }
            return sr.exit_code;
        }

        const ftrack::RunResult rr = ftrack::run(cfg, data);
        std::printf("t_end=%.6g steps=%ld events=%ld (interactions %ld, coalesces %ld, exits %ld)\n",
                    cfg.t_end, rr.steps,
                    rr.events_interaction + rr.events_coalesce + rr.events_boundary,
                    rr.events_interaction, rr.events_coalesce, rr.events_boundary);
        std::printf("L0=%.6g final L=%.6g L_in=%.6g osc_v=%.3e mass_err=%.3e max_rh=%.3e\n",
                    rr.L0, rr.samples.back().L, rr.samples.back().L_in, rr.samples.back().osc_v,
                    rr.samples.back().mass - rr.rc.M, rr.max_rh_residual);
        if (cfg.check_flocking) {
            const auto& fc = rr.rc.fc;
            std::printf("flocking: condition %s, q=%.6g, T1=%.6g, xi_bar=%.6g, lambda=%.6g\n",
                        fc.condition_holds ? "HOLDS" : "fails", fc.q, fc.T1, fc.xi_bar, fc.lambda);
            if (rr.fit_valid) {
                if (rr.fit.all_zero) {
                    std::printf("decay fit: oscillation identically zero (flock exact)\n");
                } else {
                    std::printf("decay fit: osc_v ~ %.4g exp(-%.4g t)\n", rr.fit.C,
                                rr.fit.lambda_hat);
                }
            }
        }
        if (rr.monitor.total_violations() > 0) {
            std::fprintf(stderr, "invariant violations detected: %ld (see report.json)\n",
                         rr.monitor.total_violations());
        }
        if (!rr.error.empty()) std::fprintf(stderr, "error: %s\n", rr.error.c_str());
        return rr.exit_code;
    } catch (const ftrack::ConfigRejected& e) {
        std::fprintf(stderr, "config rejected: %s\n", e.what());
        return 2;
    } catch (const ftrack::EventCapExceeded& e) {
        std::fprintf(stderr, "event cap: %s\n", e.what());
        return 3;
    } catch (const ftrack::SimError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
