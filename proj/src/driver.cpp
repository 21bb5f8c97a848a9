#include "ftrack/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

namespace ftrack {

namespace {

constexpr double kExact = 1e-12;
constexpr double kIdentity = 1e-10;
constexpr double kConsistency = 1e-9;
constexpr double kDriftRate = 20.0;  // frozen empirical constant for |d momentum/dt| <= C eta

struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

const char* kind_name(EventKind k, bool coalesced) {
    switch (k) {
        case EventKind::Interaction: return coalesced ? "coalesce" : "interaction";
        case EventKind::BoundaryExit: return "boundary";
        case EventKind::TimeStep: return "step";
        case EventKind::Purge: return "purge";
        case EventKind::Arrive: return "arrive";
    }
    return "?";
}

} // namespace

long MonitorReport::total_violations() const {
    long n = 0;
    for (const CheckStat* c : {&l_event, &l_step, &lin_boundary, &lxi_event, &lxi_step,
                               &tre_uno, &tre_due, &interaction_signs, &raref_cap, &split_signs,
                               &split_conservation, &sandwich, &cross_check, &momentum_recursion,
                               &momentum_drift, &v_bound, &mass_error, &u_confine, &tv_v_bound,
                               &lin_identity, &consistency, &w_bound, &w_boundary, &l_le_q,
                               &v0_stability, &support_length, &gen_extinction}) {
        n += c->violations;
    }
    return n;
}

ResolvedConfig resolve_config(SimConfig cfg, const InitialData& data) {
    data.validate();
    ResolvedConfig rc;
    rc.q = initial_bulk(data.rho, data.v, cfg.alpha);
    rc.M = data.total_mass();
    rc.tsb = timestep_bounds(rc.q);
    rc.c_q = c_of_q(rc.q);
    rc.fc = flocking_constants(data.rho, data.v, cfg.alpha, rc.M);

    const double scale = std::pow(2.0, -cfg.nu);
    rc.dt = cfg.dt_override.value_or(scale);
    rc.eta = cfg.eta_override.value_or(std::max(8.0 * rc.tsb.C1_minus * rc.M * rc.q, 0.125) * scale);
    if (!(rc.dt > 0.0) || !(rc.eta > 0.0)) throw ConfigRejected("dt and eta must be positive");
    if (!(rc.M * rc.dt < 1.0)) throw ConfigRejected("M*dt must be < 1");
    if (rc.tsb.C1_minus * rc.M * rc.dt * rc.q > rc.eta * (1.0 + 1e-12)) {
        throw ConfigRejected("time step too large for eta: need C1^-(q) M dt q <= eta");
    }

    const double fallback_xi = std::max(1.0, 1.0 / std::sqrt(rc.M * rc.fc.T1));
    rc.xi_mono = rc.c_q > 0.0 ? 1.0 / rc.c_q : fallback_xi;
    rc.xi_gen = rc.c_q > 0.0 ? 1.0 / std::sqrt(rc.c_q) : fallback_xi;
    if (cfg.xi_override) {
        const double xi = *cfg.xi_override;
        if (!(xi >= 1.0) || (rc.c_q > 0.0 && xi > (1.0 + 1e-12) / rc.c_q)) {
            throw ConfigRejected("xi must lie in [1, 1/c(q)]");
        }
        rc.xi_mono = xi;
    }

    const double u0 = data.u_tilde_0(), uM = data.u_tilde_M();
    rc.u_inf = std::exp(-2.0 * rc.q) * std::max(u0, uM);
    rc.u_sup = std::exp(2.0 * rc.q) * std::min(u0, uM);

    rc.probes = cfg.probes;
    if (rc.probes.empty()) rc.probes = {0.25 * rc.M, 0.5 * rc.M, 0.75 * rc.M};
    for (double y : rc.probes) {
        if (!(y > 0.0) || !(y < rc.M)) throw ConfigRejected("probe positions must lie in (0, M)");
    }
    if (cfg.k_max < 1) throw ConfigRejected("k_max must be >= 1");
    if (!(cfg.sample_dt > 0.0)) throw ConfigRejected("sample_dt must be positive");
    if (!(cfg.t_end > 0.0)) throw ConfigRejected("t_end must be positive");
    rc.cfg = std::move(cfg);
    return rc;
}

namespace {

// Everything the run loop shares with its event sink.
struct RunState {
    RunResult* rr = nullptr;
    const ResolvedConfig* rc = nullptr;
    WavePattern* p = nullptr;
    BoundaryTrace trace;
    std::vector<ProbeTracker> probes;
    Kahan int_lin;
    double prev_t = 0.0;
    DiagRecord prev;  // last emitted diag (any kind)
    double v0_initial = 0.0;
    long step_n = 0;  // completed steps
    std::FILE* csv = nullptr;
    std::ofstream frames_out;

    void advance_int_lin(double t) {
        if (t > prev_t) {
            int_lin.add(prev.L_in * (t - prev_t));
            prev_t = t;
        }
    }
};

DiagRecord merged_diag(RunState& st, EventKind kind, bool coalesced) {
    DiagRecord d = compute_diag(*st.p, st.rc->xi_gen, st.rc->cfg.k_max);
    d.L_xi = compute_diag(*st.p, st.rc->xi_mono, 1).L_xi;
    d.kind = kind;
    d.coalesced = coalesced;
    d.step_n = st.step_n;
    d.int_Lin = st.int_lin.sum;
    d.W.reserve(st.probes.size());
    for (const auto& pr : st.probes) d.W.push_back(pr.W);
    return d;
}

void write_csv_row(RunState& st, const DiagRecord& d, const char* kind) {
    if (!st.csv) return;
    std::string row = fmt(d.t);
    row += ',';
    row += std::to_string(d.step_n);
    row += ',';
    row += kind;
    for (double x : {d.L, d.L_in, d.L_0out, d.L_Mout, d.L_xi, d.V, d.tv_ln_u, d.tv_v,
                     d.osc_v, d.u_min, d.u_max, d.mass, d.momentum, d.int_Lin}) {
        row += ',';
        row += fmt(x);
    }
    for (double w : d.W) {
        row += ',';
        row += fmt(w);
    }
    for (double f : d.F) {
        row += ',';
        row += fmt(f);
    }
    row += '\n';
    std::fwrite(row.data(), 1, row.size(), st.csv);
}

void check_interaction(RunState& st, const EventRecord& ev, const DiagRecord& now) {
    MonitorReport& m = st.rr->monitor;
    const DiagRecord& before = st.prev;
    if (ev.kind == EventKind::BoundaryExit) {
        m.l_event.observe(std::fabs(now.L - before.L) - kExact);
        m.lin_boundary.observe(std::fabs(now.L_in - before.L_in + std::fabs(ev.eps_exit)) - kExact);
        return;
    }
    m.l_event.observe(now.L - before.L - kExact);
    if (ev.kind == EventKind::Purge || !ev.same_family) return;

    const double xi = st.rc->xi_mono;
    m.lxi_event.observe(now.L_xi - before.L_xi + (xi - 1.0) * std::fabs(ev.eps_refl) - kExact);

    // tre-uno / tre-due: eps2 - eps1 = a + b for family 2 (mirrored for 1),
    // h(eps1) + h(eps2) = h(a) + h(b).
    const double e_same = ev.eps_same, e_refl = ev.eps_refl;
    const double e1 = ev.family_same == 1 ? e_same : e_refl;
    const double e2 = ev.family_same == 2 ? e_same : e_refl;
    const double lhs_uno = ev.family_same == 2 ? e2 - e1 : e1 - e2;
    m.tre_uno.observe(std::fabs(lhs_uno - (ev.eps_a + ev.eps_b)) - kIdentity);
    m.tre_due.observe(std::fabs(wave_h(e1) + wave_h(e2) - wave_h(ev.eps_a) - wave_h(ev.eps_b)) -
                      kIdentity);

    // Lemma 2.9 structure. Both shocks: outgoing shock between max and sum,
    // reflected wave a rarefaction. Mixed signs: reflected wave a shock of
    // size at most c(q) min(|a|,|b|).
    const double aa = std::fabs(ev.eps_a), ab = std::fabs(ev.eps_b);
    bool bad = false;
    if (ev.eps_a < 0.0 && ev.eps_b < 0.0) {
        bad = e_refl < 0.0 || e_same >= 0.0 ||
              std::fabs(e_same) < std::max(aa, ab) - kExact ||
              std::fabs(e_same) > aa + ab + kExact;
    } else if (ev.eps_a * ev.eps_b < 0.0) {
        bad = e_refl > 0.0 ||
              std::fabs(e_refl) > st.rc->c_q * std::min(aa, ab) * (1.0 + 1e-9) + 1e-14;
    }
    m.interaction_signs.observe(bad ? 1.0 : -1.0);
    if (e_same > 0.0) m.raref_cap.observe(e_same - st.rc->eta * (1.0 + 1e-9));
    if (e_refl > 0.0) m.raref_cap.observe(e_refl - st.rc->eta * (1.0 + 1e-9));
}

void check_split(RunState& st, const SplitOutcome& oc) {
    MonitorReport& m = st.rr->monitor;
    const double in = std::fabs(oc.eps_in);
    if (in == 0.0) return;
    m.split_conservation.observe(
        std::fabs(std::fabs(oc.eps_same) + std::fabs(oc.eps_refl) - in) - kExact);
    const bool sign_bad = oc.eps_refl * oc.eps_in >= 0.0 || oc.eps_same * oc.eps_in <= 0.0;
    m.split_signs.observe(sign_bad ? 1.0 : -1.0);

    const double ratio = std::fabs(oc.eps_refl) / (st.rc->M * st.rc->dt * in);
    const double hi = oc.eps_in > 0.0 ? st.rc->tsb.C1_plus : st.rc->tsb.C1_minus;
    m.sandwich.observe(st.rc->tsb.c1 * (1.0 - 1e-9) - ratio);
    m.sandwich.observe(ratio - hi * (1.0 + 1e-9));

    // For either family the reflected strength solves the same implicit
    // equation h(y) + h(eps_in + y) = h(eps_in)(1 - M dt).
    const double oracle = implicit_split(oc.eps_in, st.rc->dt, st.rc->M);
    m.cross_check.observe(std::fabs(oc.eps_refl - oracle) - kIdentity);
    if (oc.eps_refl > 0.0) m.raref_cap.observe(oc.eps_refl - st.rc->eta * (1.0 + 1e-9));
}

void check_sample(RunState& st, const DiagRecord& d, const EulerianFrame& fr) {
    MonitorReport& m = st.rr->monitor;
    const ResolvedConfig& rc = *st.rc;
    (void)fr;
    m.mass_error.observe(std::fabs(d.mass - rc.M) - kExact);
    m.u_confine.observe(rc.u_inf * (1.0 - 1e-10) - d.u_min);
    m.u_confine.observe(d.u_max - rc.u_sup * (1.0 + 1e-10));
    m.tv_v_bound.observe(d.tv_v - 2.0 * rc.cfg.alpha * std::cosh(rc.q) * d.L_in - kIdentity);
    m.lin_identity.observe(std::fabs(d.L_in - d.tv_ln_u) - kIdentity);
    m.l_le_q.observe(d.L - rc.q - kExact);
    m.consistency.observe(st.p->consistency_error() - kConsistency);
    m.support_length.observe((fr.b - fr.a) - rc.M * rc.u_sup * (1.0 + 1e-10));

    // Lemma 4.2: V <= (1 + (xi^2-1) M dt / 2)^n V(0+).
    const double factor = 1.0 + 0.5 * (rc.xi_gen * rc.xi_gen - 1.0) * rc.M * rc.dt;
    const double vb = std::pow(factor, static_cast<double>(d.step_n)) * st.rr->V0;
    m.v_bound.observe(d.V - vb - kIdentity);

    // W_y bounds with C1~ = (3 + cosh q)/2, C2~ = (cosh q + 1)/2.
    const double c1t = 0.5 * (3.0 + std::cosh(rc.q));
    const double c2t = 0.5 * (std::cosh(rc.q) + 1.0);
    for (double w : d.W) {
        m.w_bound.observe(w - c1t * st.rr->L0 - c2t * rc.M * d.int_Lin - kIdentity);
    }
    m.w_boundary.observe(d.L_0out + d.L_Mout - st.rr->L0 - kExact);
    m.v0_stability.observe(std::fabs(st.p->cells.front().v - st.v0_initial) -
                           2.0 * rc.cfg.alpha * std::cosh(rc.q) * st.rr->L0 - kIdentity);

    // No generation-k front may outlive k T1.
    for (const auto& f : st.p->fronts) {
        const double deadline = static_cast<double>(f.gen) * rc.fc.T1 * (1.0 + 1e-6);
        m.gen_extinction.observe(d.t > deadline ? 1.0 : -1.0);
        if (d.t > deadline) break;
    }
}

} // namespace

RunResult run(const SimConfig& cfg_in, const InitialData& raw) {
    const auto t0 = std::chrono::steady_clock::now();
    InitialData data = normalize(raw);
    ResolvedConfig rc = resolve_config(cfg_in, data);
    const SimConfig& cfg = rc.cfg;

    RunResult rr;
    rr.rc = rc;
    rr.data = data;

    WavePattern p = init_pattern(data.lagrangian(), cfg.alpha, rc.eta);
    p.jitter_scale = cfg.jitter_scale;
    p.event_cap = cfg.event_cap;
    if (cfg.coalesce) {
        p.coalesce_threshold = 0.25 * rc.eta;
        p.coalesce_gap = 1.0 * rc.dt;
        // Below this strength a front's own reflections would fall under the
        // zero-wave cutoff; such fronts are retired before they can spoil
        // the states next to them.
        p.purge_threshold = std::min(4.0 * kZeroWave / (rc.tsb.c1 * rc.M * rc.dt), 1e-6 * rc.eta);
    }

    RunState st;
    st.rr = &rr;
    st.rc = &rc;
    st.p = &p;
    st.trace = BoundaryTrace::start(p);
    for (double y : rc.probes) st.probes.push_back(ProbeTracker{y, 0.0, 0.0});
    for (auto& pr : st.probes) pr.refresh_approaching(p);
    st.v0_initial = p.cells.front().v;

    namespace fs = std::filesystem;
    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        st.csv = std::fopen((fs::path(cfg.out_dir) / "diag.csv").string().c_str(), "w");
        if (!st.csv) throw SimError("cannot open diag.csv for writing");
        std::string header =
            "t,n,kind,L,L_in,L_0out,L_Mout,L_xi,V,tv_ln_u,tv_v,osc_v,u_min,u_max,mass,momentum,"
            "int_Lin";
        for (std::size_t i = 0; i < rc.probes.size(); ++i) header += ",W" + std::to_string(i + 1);
        for (int k = 1; k <= cfg.k_max; ++k) header += ",F" + std::to_string(k);
        header += "\n";
        std::fwrite(header.data(), 1, header.size(), st.csv);
        st.frames_out.open((fs::path(cfg.out_dir) / "frames.jsonl").string());
    }

    auto emit_frame = [&](const EulerianFrame& fr) {
        rr.frames.push_back(fr);
        try {
            rr.max_rh_residual = std::max(rr.max_rh_residual, rh_residual_max(fr));
        } catch (const DegenerateJump&) {
            rr.monitor.consistency.observe(1.0);
        }
        if (st.frames_out.is_open()) {
            nlohmann::json j;
            const double shift = cfg.deshift ? data.v_bar : 0.0;
            j["t"] = fr.t;
            j["a"] = fr.a + shift * fr.t;
            j["b"] = fr.b + shift * fr.t;
            auto& xs = j["x"] = nlohmann::json::array();
            for (double x : fr.x) xs.push_back(x + shift * fr.t);
            auto& cs = j["cells"] = nlohmann::json::array();
            for (const auto& c : fr.cells) {
                cs.push_back({{"rho", c.rho}, {"v", c.v + shift}, {"m", c.rho * (c.v + shift)}});
            }
            j["rh_residual_max"] = fr.rh_residual.empty()
                                       ? 0.0
                                       : *std::max_element(fr.rh_residual.begin(), fr.rh_residual.end());
            st.frames_out << j.dump() << "\n";
        }
    };

    auto store_profile = [&]() {
        if (!cfg.store_profiles) return;
        UProfile up;
        up.t = p.t;
        up.y.reserve(p.fronts.size());
        for (const auto& f : p.fronts) up.y.push_back(f.y);
        up.u.reserve(p.cells.size());
        for (const auto& c : p.cells) up.u.push_back(c.u);
        rr.profiles.push_back(std::move(up));
    };

    // Initial diagnostics at t = 0+.
    st.prev = merged_diag(st, EventKind::Arrive, false);
    rr.L0 = st.prev.L;
    rr.V0 = st.prev.V;
    rr.monitor.l_le_q.observe(rr.L0 - rc.q - kExact);
    rr.samples.push_back(st.prev);
    write_csv_row(st, st.prev, "init");
    emit_frame(to_euler(p, st.trace, data.a0));
    store_profile();

    EventSink sink = [&](const WavePattern& pat, const EventRecord& ev) {
        st.advance_int_lin(ev.time);
        st.trace.advance_to(ev.time);
        st.trace.sync(pat);
        for (auto& pr : st.probes) probe_update(pr, pat, ev);
        if (ev.kind == EventKind::Arrive) return;
        DiagRecord d = merged_diag(st, ev.kind, ev.coalesced);
        check_interaction(st, ev, d);
        if (ev.kind == EventKind::Interaction) {
            if (ev.coalesced) ++rr.events_coalesce; else ++rr.events_interaction;
        } else if (ev.kind == EventKind::Purge) {
            ++rr.events_purge;
        } else {
            ++rr.events_boundary;
        }
        write_csv_row(st, d, kind_name(ev.kind, ev.coalesced));
        st.prev = d;
    };

    const double t_end = cfg.t_end;
    const long total_steps = static_cast<long>(std::floor(t_end / rc.dt + 1e-9));
    long next_sample = 1;
    int exit_code = 0;
    std::string error;

    try {
        double cursor = 0.0;
        while (cursor < t_end - 1e-15) {
            const double ts = st.step_n < total_steps
                                  ? static_cast<double>(st.step_n + 1) * rc.dt
                                  : std::numeric_limits<double>::infinity();
            double tq = static_cast<double>(next_sample) * cfg.sample_dt;
            if (tq > t_end) tq = std::numeric_limits<double>::infinity();
            const double target = std::min({ts, tq, t_end});

            advance(p, target, sink);
            st.advance_int_lin(target);
            st.trace.advance_to(target);
            cursor = target;

            if (target == ts) {
                DiagRecord pre = merged_diag(st, EventKind::TimeStep, false);
                pre.t = p.t;
                rr.step_pre.push_back(pre);
                write_csv_row(st, pre, "step_pre");
                st.prev = pre;

                const auto outcomes = resolve_time_step(p, rc.M, rc.dt);
                rr.splits += static_cast<long>(outcomes.size());
                for (const auto& oc : outcomes) check_split(st, oc);
                ++st.step_n;
                ++rr.steps;

                st.trace.sync(p);
                for (auto& pr : st.probes) pr.refresh_approaching(p);

                DiagRecord post = merged_diag(st, EventKind::TimeStep, false);
                rr.step_post.push_back(post);
                write_csv_row(st, post, "step_post");
                rr.monitor.l_step.observe(std::fabs(post.L - pre.L) - kExact);
                rr.monitor.lxi_step.observe(post.L_xi - pre.L_xi -
                                            0.5 * rc.M * rc.dt * (rc.xi_mono - 1.0) * pre.L_in -
                                            kExact);
                rr.monitor.momentum_recursion.observe(
                    std::fabs(post.momentum - (1.0 - rc.M * rc.dt) * pre.momentum) - kExact);
                st.prev = post;

                coalesce_pass(p, sink);
            }
            if (target == tq || (target == t_end && tq >= t_end)) {
                DiagRecord d = merged_diag(st, EventKind::Arrive, false);
                const EulerianFrame fr = to_euler(p, st.trace, data.a0);
                check_sample(st, d, fr);
                if (!rr.samples.empty() && rr.samples.back().t < d.t) {
                    const DiagRecord& prev_s = rr.samples.back();
                    const bool crossed_step = prev_s.step_n != d.step_n;
                    if (!crossed_step) {
                        rr.monitor.momentum_drift.observe(
                            std::fabs(d.momentum - prev_s.momentum) -
                            kDriftRate * rc.eta * (d.t - prev_s.t) - kExact);
                    }
                }
                rr.samples.push_back(d);
                write_csv_row(st, d, "sample");
                emit_frame(fr);
                store_profile();
                if (d.t >= 5.0) {
                    rr.sup_momentum_tail = std::max(rr.sup_momentum_tail, std::fabs(d.momentum));
                }
                st.prev = d;
                if (target == tq) ++next_sample;
            }
        }
    } catch (const EventCapExceeded& e) {
        exit_code = 3;
        error = e.what();
    } catch (const SimError& e) {
        exit_code = 4;
        error = e.what();
    }

    rr.fit_valid = false;
    if (rr.samples.size() >= 2) {
        std::vector<double> ts, os;
        for (const auto& s : rr.samples) {
            ts.push_back(s.t);
            os.push_back(s.osc_v);
        }
        try {
            rr.fit = fit_decay(ts, os, rc.fc.T1);
            rr.fit_valid = true;
        } catch (const InsufficientData&) {
        }
    }

    if (exit_code == 0 && rr.monitor.total_violations() > 0) exit_code = 4;
    rr.exit_code = exit_code;
    rr.error = error;
    rr.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                     .count();

    if (st.csv) std::fclose(st.csv);
    if (st.frames_out.is_open()) st.frames_out.close();
    if (!cfg.out_dir.empty()) {
        std::ofstream rep(std::filesystem::path(cfg.out_dir) / "report.json");
        rep << report_json(rr) << "\n";
    }
    return rr;
}

double l1_profile_distance(const UProfile& a, const UProfile& b, double M) {
    double dist = 0.0;
    std::size_t ia = 0, ib = 0;
    double y = 0.0;
    while (y < M) {
        const double ya = ia < a.y.size() ? a.y[ia] : M;
        const double yb = ib < b.y.size() ? b.y[ib] : M;
        const double yn = std::min({ya, yb, M});
        dist += std::fabs(a.u[ia] - b.u[ib]) * (yn - y);
        if (yn == ya && ia < a.y.size()) ++ia;
        if (yn == yb && ib < b.y.size()) ++ib;
        y = yn;
    }
    return dist;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

} // namespace

SweepResult sweep(const SimConfig& base, const InitialData& raw, const std::vector<int>& nus) {
    if (nus.size() < 2) throw ConfigRejected("sweep needs at least two nu values");
    SweepResult sr;
    sr.runs.resize(nus.size());
    std::vector<std::thread> workers;
    workers.reserve(nus.size());
    for (std::size_t i = 0; i < nus.size(); ++i) {
        workers.emplace_back([&, i]() {
            SimConfig cfg = base;
            cfg.nu = nus[i];
            cfg.store_profiles = true;
            if (!base.out_dir.empty()) {
                cfg.out_dir = base.out_dir + "/nu" + std::to_string(nus[i]);
            }
            sr.runs[i] = run(cfg, raw);
        });
    }
    for (auto& w : workers) w.join();

    std::vector<double> log_eta, log_resid, log_mom;
    for (const auto& r : sr.runs) {
        sr.etas.push_back(r.rc.eta);
        sr.max_residuals.push_back(r.max_rh_residual);
        sr.sup_momenta.push_back(r.sup_momentum_tail);
        sr.exit_code = std::max(sr.exit_code, r.exit_code);
        log_eta.push_back(std::log(r.rc.eta));
        log_resid.push_back(std::log(std::max(r.max_rh_residual, 1e-300)));
        log_mom.push_back(std::log(std::max(r.sup_momentum_tail, 1e-300)));
    }
    sr.residual_slope = fit_slope(log_eta, log_resid);
    sr.momentum_slope = fit_slope(log_eta, log_mom);

    for (std::size_t i = 0; i + 1 < sr.runs.size(); ++i) {
        const auto& a = sr.runs[i];
        const auto& b = sr.runs[i + 1];
        const std::size_t n = std::min(a.profiles.size(), b.profiles.size());
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (a.profiles[k].t != b.profiles[k].t) continue;
            worst = std::max(worst,
                             l1_profile_distance(a.profiles[k], b.profiles[k], a.rc.M));
        }
        sr.l1_u_distance.push_back(worst);
    }

    if (!base.out_dir.empty()) {
        std::filesystem::create_directories(base.out_dir);
        std::ofstream rep(std::filesystem::path(base.out_dir) / "sweep.json");
        rep << sweep_report_json(sr) << "\n";
    }
    return sr;
}

namespace {

nlohmann::json check_json(const CheckStat& c) {
    return {{"violations", c.violations}, {"checks", c.checks}, {"worst_excess", c.worst}};
}

} // namespace

std::string report_json(const RunResult& rr) {
    const ResolvedConfig& rc = rr.rc;
    nlohmann::json j;
    j["config"] = {{"alpha", rc.cfg.alpha},   {"nu", rc.cfg.nu},
                   {"dt", rc.dt},             {"eta", rc.eta},
                   {"t_end", rc.cfg.t_end},   {"xi_mono", rc.xi_mono},
                   {"xi_gen", rc.xi_gen},     {"k_max", rc.cfg.k_max},
                   {"sample_dt", rc.cfg.sample_dt}, {"probes", rc.probes},
                   {"event_cap", rc.cfg.event_cap}, {"deshift", rc.cfg.deshift},
                   {"coalesce", rc.cfg.coalesce},   {"jitter_scale", rc.cfg.jitter_scale}};
    j["data"] = {{"M", rc.M},
                 {"q", rc.q},
                 {"v_bar", rr.data.v_bar},
                 {"u_tilde_0", rr.data.u_tilde_0()},
                 {"u_tilde_M", rr.data.u_tilde_M()},
                 {"u_inf", rc.u_inf},
                 {"u_sup", rc.u_sup},
                 {"c_q", rc.c_q}};
    j["flocking"] = {{"condition_holds", rc.fc.condition_holds},
                     {"T1", rc.fc.T1},
                     {"xi_bar", rc.fc.xi_bar},
                     {"lambda", rc.fc.lambda},
                     {"rate_positive", rc.fc.rate_positive}};
    if (rr.fit_valid) {
        j["decay_fit"] = {{"C", rr.fit.C},
                          {"lambda_hat", rr.fit.all_zero ? "inf" : fmt(rr.fit.lambda_hat)},
                          {"all_zero", rr.fit.all_zero}};
    }
    if (!rr.samples.empty()) {
        const DiagRecord& last = rr.samples.back();
        j["final"] = {{"t", last.t},         {"L", last.L},
                      {"L_in", last.L_in},   {"L_0out", last.L_0out},
                      {"L_Mout", last.L_Mout}, {"L_xi", last.L_xi},
                      {"V", last.V},         {"osc_v", last.osc_v},
                      {"mass", last.mass},   {"momentum", last.momentum}};
    }
    j["stats"] = {{"events_interaction", rr.events_interaction},
                  {"events_coalesce", rr.events_coalesce},
                  {"events_boundary", rr.events_boundary},
                  {"events_purge", rr.events_purge},
                  {"steps", rr.steps},
                  {"splits", rr.splits},
                  {"L0", rr.L0},
                  {"max_rh_residual", rr.max_rh_residual},
                  {"sup_momentum_tail", rr.sup_momentum_tail},
                  {"wall_ms", rr.wall_ms}};
    nlohmann::json checks;
    const MonitorReport& m = rr.monitor;
    checks["l_event"] = check_json(m.l_event);
    checks["l_step"] = check_json(m.l_step);
    checks["lin_boundary"] = check_json(m.lin_boundary);
    checks["lxi_event"] = check_json(m.lxi_event);
    checks["lxi_step"] = check_json(m.lxi_step);
    checks["tre_uno"] = check_json(m.tre_uno);
    checks["tre_due"] = check_json(m.tre_due);
    checks["interaction_signs"] = check_json(m.interaction_signs);
    checks["raref_cap"] = check_json(m.raref_cap);
    checks["split_signs"] = check_json(m.split_signs);
    checks["split_conservation"] = check_json(m.split_conservation);
    checks["sandwich"] = check_json(m.sandwich);
    checks["cross_check"] = check_json(m.cross_check);
    checks["momentum_recursion"] = check_json(m.momentum_recursion);
    checks["momentum_drift"] = check_json(m.momentum_drift);
    checks["v_bound"] = check_json(m.v_bound);
    checks["mass_error"] = check_json(m.mass_error);
    checks["u_confine"] = check_json(m.u_confine);
    checks["tv_v_bound"] = check_json(m.tv_v_bound);
    checks["lin_identity"] = check_json(m.lin_identity);
    checks["consistency"] = check_json(m.consistency);
    checks["w_bound"] = check_json(m.w_bound);
    checks["w_boundary"] = check_json(m.w_boundary);
    checks["l_le_q"] = check_json(m.l_le_q);
    checks["v0_stability"] = check_json(m.v0_stability);
    checks["support_length"] = check_json(m.support_length);
    checks["gen_extinction"] = check_json(m.gen_extinction);
    j["checks"] = checks;
    j["total_violations"] = m.total_violations();
    j["exit_code"] = rr.exit_code;
    if (!rr.error.empty()) j["error"] = rr.error;
    return j.dump(2);
}

std::string sweep_report_json(const SweepResult& sr) {
    nlohmann::json j;
    j["etas"] = sr.etas;
    j["max_residuals"] = sr.max_residuals;
    j["sup_momenta"] = sr.sup_momenta;
    j["residual_slope"] = sr.residual_slope;
    j["momentum_slope"] = sr.momentum_slope;
    j["l1_u_distance"] = sr.l1_u_distance;
    j["exit_code"] = sr.exit_code;
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : sr.runs) {
        runs.push_back({{"nu", r.rc.cfg.nu},
                        {"eta", r.rc.eta},
                        {"dt", r.rc.dt},
                        {"violations", r.monitor.total_violations()},
                        {"exit_code", r.exit_code}});
    }
    j["runs"] = runs;
    return j.dump(2);
}

} // namespace ftrack
