#include <cmath>
#include <doctest.h>

#include "ftrack/functionals.hpp"
#include "ftrack/tracker.hpp"

using namespace ftrack;

namespace {

WavePattern shock_pattern(double y, int family, double eps, int gen = 1) {
    WavePattern p;
    p.alpha = 1.0;
    p.M = 1.0;
    p.eta = 0.5;
    p.cells.push_back(LagState{1.0, 0.0});
    Front f;
    f.id = p.next_id++;
    f.y = y;
    f.family = family;
    f.eps = eps;
    f.kind = kind_of(eps);
    f.gen = gen;
    const LagState right = lax_state(family, p.cells.back(), eps, 1.0);
    f.speed = assigned_speed(family, eps, p.cells.back(), right, 1.0);
    f.stamp = p.next_seq++;
    p.fronts.push_back(f);
    p.cells.push_back(right);
    p.rebuild_index();
    p.schedule_all();
    return p;
}

} // namespace

TEST_CASE("initial_bulk on the worked examples") {
    SUBCASE("constant data have zero bulk") {
        const double rho[] = {2.0, 2.0};
        const double v[] = {0.3, 0.3};
        CHECK(initial_bulk(rho, v, 1.0) == 0.0);
    }
    SUBCASE("density jump only") {
        const double rho[] = {1.0, 2.0};
        const double v[] = {0.0, 0.0};
        CHECK(initial_bulk(rho, v, 1.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
    }
    SUBCASE("velocity jump only, alpha = 2") {
        const double rho[] = {1.0, 1.0};
        const double v[] = {0.0, 1.0};
        CHECK(initial_bulk(rho, v, 2.0) == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("invalid density") {
        const double rho[] = {1.0, 0.0};
        const double v[] = {0.0, 0.0};
        CHECK_THROWS_AS(initial_bulk(rho, v, 1.0), NonPositiveDensity);
    }
}

TEST_CASE("c_of_q evaluates (cosh q - 1)/(cosh q + 1)") {
    CHECK(c_of_q(0.0) == 0.0);
    CHECK(c_of_q(1.0) == doctest::Approx(0.2135532).epsilon(1e-6));
    CHECK(c_of_q(2.0) == doctest::Approx(0.5800256).epsilon(1e-6));
    // Same function as tanh^2(q/2).
    CHECK(c_of_q(0.7) == doctest::Approx(std::pow(std::tanh(0.35), 2)).epsilon(1e-14));
}

TEST_CASE("compute_diag on the worked examples") {
    SUBCASE("empty pattern") {
        WavePattern p;
        p.alpha = 1.0;
        p.M = 1.0;
        p.eta = 0.5;
        p.cells.push_back(LagState{2.0, 0.0});
        const DiagRecord d = compute_diag(p, 2.0, 8);
        CHECK(d.L == 0.0);
        CHECK(d.L_in == 0.0);
        CHECK(d.L_xi == 0.0);
        CHECK(d.V == 0.0);
        CHECK(d.osc_v == 0.0);
        CHECK(d.mass == doctest::Approx(1.0).epsilon(1e-15));  // (1/u) * (u * M) = M
    }
    SUBCASE("single active 2-shock, xi = 2") {
        WavePattern p = shock_pattern(0.5, 2, -0.3);
        const DiagRecord d = compute_diag(p, 2.0, 8);
        CHECK(d.L == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(d.L_in == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(d.L_xi == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(d.F[0] == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(d.V == doctest::Approx(1.2).epsilon(1e-15));
        CHECK(d.tv_ln_u == doctest::Approx(0.3).epsilon(1e-12));  // = L_in
        CHECK(d.L_in >= d.tv_ln_u - 1e-10);
        CHECK(d.L_in <= d.tv_ln_u + 1e-10);
    }
    SUBCASE("standby plus active front") {
        WavePattern p = shock_pattern(0.5, 2, 0.2);
        Front sb;
        sb.id = 99;
        sb.family = 1;
        sb.eps = -0.1;
        sb.kind = WaveKind::Shock;
        sb.status = FrontStatus::StandbyLeft;
        sb.exit_time = 0.125;
        p.standby_left.push_back(sb);
        p.sum_out_left = 0.1;
        const DiagRecord d = compute_diag(p, 1.5, 8);
        CHECK(d.L == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(d.L_in == doctest::Approx(0.2).epsilon(1e-15));
        CHECK(d.L_0out == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(d.L_Mout == 0.0);
        // L_in <= L_xi <= xi L_in; sum of F_k equals L_xi.
        CHECK(d.L_xi >= d.L_in);
        CHECK(d.L_xi <= 1.5 * d.L_in);
        double fsum = 0.0;
        for (double f : d.F) fsum += f;
        CHECK(fsum == doctest::Approx(d.L_xi).epsilon(1e-15));
    }
    SUBCASE("generation overflow aggregates into the last bucket") {
        WavePattern p = shock_pattern(0.5, 2, -0.3, 7);
        const DiagRecord d = compute_diag(p, 1.0, 4);
        CHECK(d.F[3] == doctest::Approx(0.3).epsilon(1e-15));
    }
}

TEST_CASE("flocking_constants from the initial datum") {
    SUBCASE("uniform rho = 2 on [0, 1/2]") {
        const double rho[] = {2.0};
        const double v[] = {0.0};
        const FlockingConstants fc = flocking_constants(rho, v, 1.0, 1.0);
        CHECK(fc.q == 0.0);
        CHECK(fc.condition_holds);  // 1 < 2
        CHECK(fc.T1 == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(fc.xi_bar == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        // lambda(xi_bar) = (1 - 2)/2 + ln(sqrt 2)/0.5 = (M T1 - 1 - ln(M T1))/(2 T1)
        CHECK(fc.lambda == doctest::Approx(0.1931471805599453).epsilon(1e-12));
        CHECK(fc.lambda ==
              doctest::Approx((0.5 - 1.0 - std::log(0.5)) / (2.0 * 0.5)).epsilon(1e-14));
        CHECK(fc.rate_positive);
    }
    SUBCASE("boundary case rho = 1 on [0, 1] fails the strict inequality") {
        const double rho[] = {1.0};
        const double v[] = {0.0};
        const FlockingConstants fc = flocking_constants(rho, v, 1.0, 1.0);
        CHECK(!fc.condition_holds);
        CHECK(!fc.rate_positive);
    }
    SUBCASE("large bulk kills the condition") {
        const double rho[] = {1.0, 100.0, 1.0};
        const double v[] = {0.0, 0.0, 0.0};
        const FlockingConstants fc = flocking_constants(rho, v, 1.0, 1.0);
        CHECK(fc.q > 2.0);
        CHECK(!fc.condition_holds);
    }
}

TEST_CASE("probe trackers charge crossings") {
    SUBCASE("no crossings, no charge") {
        ProbeTracker pr{0.5, 0.0, 0.0};
        pr.on_motion(Motion{1, -0.2, 0.1, 0.4});
        CHECK(pr.W == 0.0);
    }
    SUBCASE("single 2-shock crossing charges |eps| once, then never again") {
        WavePattern p = shock_pattern(0.3, 2, -0.2);
        ProbeTracker pr{0.5, 0.0, 0.0};
        pr.refresh_approaching(p);
        CHECK(pr.A == doctest::Approx(0.2).epsilon(1e-15));
        advance(p, 10.0, [&](const WavePattern& pat, const EventRecord& rec) {
            probe_update(pr, pat, rec);
        });
        CHECK(p.fronts.empty());  // absorbed on the right
        CHECK(pr.W == doctest::Approx(0.2).epsilon(1e-15));
        CHECK(pr.A == 0.0);
        // Nothing else ever happens: W stays put.
        advance(p, 20.0, [&](const WavePattern& pat, const EventRecord& rec) {
            probe_update(pr, pat, rec);
        });
        CHECK(pr.W == doctest::Approx(0.2).epsilon(1e-15));
    }
    SUBCASE("front parked exactly on the probe is charged on departure") {
        ProbeTracker pr{0.5, 0.0, 0.0};
        pr.on_motion(Motion{1, -0.2, 0.3, 0.5});  // arrives exactly: no charge yet
        CHECK(pr.W == 0.0);
        pr.on_motion(Motion{1, -0.15, 0.5, 0.7});  // departs with its current size
        CHECK(pr.W == doctest::Approx(0.15).epsilon(1e-15));
    }
}

TEST_CASE("fit_decay recovers exponential rates") {
    SUBCASE("exact synthetic series") {
        std::vector<double> t, osc;
        for (int i = 0; i < 60; ++i) {
            t.push_back(0.25 * i);
            osc.push_back(3.0 * std::exp(-0.4 * 0.25 * i));
        }
        const DecayFit fit = fit_decay(t, osc, 1.0);
        CHECK(!fit.all_zero);
        CHECK(fit.C == doctest::Approx(3.0).epsilon(1e-8));
        CHECK(fit.lambda_hat == doctest::Approx(0.4).epsilon(1e-8));
    }
    SUBCASE("all-zero oscillation reports the exact-flock sentinel") {
        std::vector<double> t, osc;
        for (int i = 0; i < 30; ++i) {
            t.push_back(0.5 * i);
            osc.push_back(0.0);
        }
        const DecayFit fit = fit_decay(t, osc, 0.0);
        CHECK(fit.all_zero);
        CHECK(std::isinf(fit.lambda_hat));
    }
    SUBCASE("noisy series stays within 2 percent") {
        std::vector<double> t, osc;
        for (int i = 0; i < 200; ++i) {
            const double ti = 0.05 * i;
            t.push_back(ti);
            osc.push_back(std::exp(-ti) * (1.0 + 0.01 * std::sin(ti)));
        }
        const DecayFit fit = fit_decay(t, osc, 0.0);
        CHECK(fit.lambda_hat == doctest::Approx(1.0).epsilon(0.02));
    }
    SUBCASE("too few samples") {
        std::vector<double> t{0, 1, 2}, osc{1, 0.5, 0.25};
        CHECK_THROWS_AS(fit_decay(t, osc, 0.0), InsufficientData);
    }
}
