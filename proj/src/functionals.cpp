#include "ftrack/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace ftrack {

namespace {

// Compensated accumulator; the functional identities are asserted at 1e-12
// so plain summation dust is worth suppressing.
struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

} // namespace

DiagRecord compute_diag(const WavePattern& p, double xi, int k_max) {
    if (!(xi >= 1.0)) throw NonPositiveInput("compute_diag: xi must be >= 1");
    if (k_max < 1) throw NonPositiveInput("compute_diag: k_max must be >= 1");
    if (p.cells.size() != p.fronts.size() + 1) {
        throw InconsistentPattern("compute_diag: cell/front count mismatch");
    }

    DiagRecord d;
    d.t = p.t;
    d.F.assign(static_cast<std::size_t>(k_max), 0.0);

    Kahan L_in, L_xi, tvlnu, tvv;
    std::vector<Kahan> F(static_cast<std::size_t>(k_max));
    for (const auto& f : p.fronts) {
        const double a = std::fabs(f.eps);
        const double weighted = f.eps < 0.0 ? xi * a : a;
        L_in.add(a);
        L_xi.add(weighted);
        const int bucket = std::min(f.gen, k_max);
        F[static_cast<std::size_t>(bucket - 1)].add(weighted);
    }
    d.L_in = L_in.sum;
    d.L_xi = L_xi.sum;
    d.L_0out = p.sum_out_left;
    d.L_Mout = p.sum_out_right;
    d.L = d.L_in + d.L_0out + d.L_Mout;

    Kahan V;
    double xik = 1.0;
    for (int k = 1; k <= k_max; ++k) {
        xik *= xi;
        d.F[static_cast<std::size_t>(k - 1)] = F[static_cast<std::size_t>(k - 1)].sum;
        if (d.F[static_cast<std::size_t>(k - 1)] != 0.0) {
            V.add(xik * d.F[static_cast<std::size_t>(k - 1)]);
        }
    }
    d.V = V.sum;

    double vmin = p.cells.front().v, vmax = vmin;
    double umin = p.cells.front().u, umax = umin;
    Kahan mass, momentum;
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
        const LagState& c = p.cells[i];
        vmin = std::min(vmin, c.v);
        vmax = std::max(vmax, c.v);
        umin = std::min(umin, c.u);
        umax = std::max(umax, c.u);
        if (i > 0) {
            tvlnu.add(std::fabs(std::log(c.u / p.cells[i - 1].u)));
            tvv.add(std::fabs(c.v - p.cells[i - 1].v));
        }
        // Eulerian cell: rho = 1/u, width dx = u * dy.
        const double lo = i == 0 ? 0.0 : p.fronts[i - 1].y;
        const double hi = i == p.fronts.size() ? p.M : p.fronts[i].y;
        const double dx = c.u * (hi - lo);
        const double rho = 1.0 / c.u;
        mass.add(rho * dx);
        momentum.add(rho * c.v * dx);
    }
    d.tv_ln_u = 0.5 * tvlnu.sum;
    d.tv_v = tvv.sum;
    d.osc_v = vmax - vmin;
    d.u_min = umin;
    d.u_max = umax;
    d.mass = mass.sum;
    d.momentum = momentum.sum;
    return d;
}

double c_of_q(double q) {
    if (!(q >= 0.0)) throw NonPositiveInput("c_of_q: q must be >= 0");
    const double ch = std::cosh(q);
    return (ch - 1.0) / (ch + 1.0);
}

double initial_bulk(std::span<const double> rho, std::span<const double> v, double alpha) {
    if (rho.empty() || rho.size() != v.size()) throw EmptySupport("initial_bulk: empty data");
    if (!(alpha > 0.0)) throw NonPositiveInput("initial_bulk: alpha must be positive");
    for (double r : rho) {
        if (!(r > 0.0)) throw NonPositiveDensity("initial_bulk: rho must be positive");
    }
    Kahan tvr, tvv;
    for (std::size_t i = 1; i < rho.size(); ++i) {
        tvr.add(std::fabs(std::log(rho[i] / rho[i - 1])));
        tvv.add(std::fabs(v[i] - v[i - 1]));
    }
    return 0.5 * tvr.sum + tvv.sum / (2.0 * alpha);
}

FlockingConstants flocking_constants(std::span<const double> rho, std::span<const double> v,
                                     double alpha, double total_mass) {
    FlockingConstants fc;
    fc.q = initial_bulk(rho, v, alpha);
    fc.c_q = c_of_q(fc.q);
    if (fc.c_q > 0.0) {
        fc.xi_max = 1.0 / fc.c_q;
        fc.xi_sqrt_max = 1.0 / std::sqrt(fc.c_q);
    }
    const double e2q = std::exp(2.0 * fc.q);
    fc.condition_holds = e2q * total_mass * total_mass < alpha * std::max(rho.front(), rho.back());
    const double u_tilde_min = std::min(1.0 / rho.front(), 1.0 / rho.back());
    fc.T1 = e2q * total_mass / alpha * u_tilde_min;
    const double mt1 = total_mass * fc.T1;
    fc.xi_bar = std::min(fc.xi_sqrt_max, 1.0 / std::sqrt(mt1));
    fc.lambda = 0.5 * (1.0 - fc.xi_bar * fc.xi_bar) * total_mass + std::log(fc.xi_bar) / fc.T1;
    fc.rate_positive = mt1 < 1.0 && fc.xi_bar > 1.0;
    return fc;
}

void ProbeTracker::on_motion(const Motion& m) {
    const double from = m.y_from - y;
    const double to = m.y_to - y;
    const bool straddles = from * to < 0.0;
    const bool departs_exact = from == 0.0 && to != 0.0;
    if (straddles || departs_exact) W += std::fabs(m.eps);
}

void ProbeTracker::refresh_approaching(const WavePattern& p) {
    Kahan a;
    for (const auto& f : p.fronts) {
        const bool approaching = (f.family == 1 && f.y > y) || (f.family == 2 && f.y < y);
        if (approaching) a.add(std::fabs(f.eps));
    }
    A = a.sum;
}

void probe_update(ProbeTracker& tracker, const WavePattern& p, const EventRecord& record) {
    for (const auto& m : record.motions) tracker.on_motion(m);
    tracker.refresh_approaching(p);
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> osc, double t0) {
    if (t.size() != osc.size()) throw InsufficientData("fit_decay: size mismatch");
    std::size_t in_window = 0, positive = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0) continue;
        ++in_window;
        if (osc[i] > 0.0) ++positive;
    }
    if (in_window > 0 && positive == 0) {
        DecayFit fit;
        fit.all_zero = true;
        return fit;
    }
    if (positive < 10) throw InsufficientData("fit_decay: need >= 10 positive samples after t0");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || !(osc[i] > 0.0)) continue;
        const double x = t[i], yv = std::log(osc[i]);
        sx += x;
        sy += yv;
        sxx += x * x;
        sxy += x * yv;
    }
    const double n = static_cast<double>(positive);
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw InsufficientData("fit_decay: degenerate sample times");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    DecayFit fit;
    fit.C = std::exp(intercept);
    fit.lambda_hat = -slope;
    fit.all_zero = false;
    return fit;
}

} // namespace ftrack
