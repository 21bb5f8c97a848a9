#include <cmath>
#include <cstdint>
#include <doctest.h>

#include "ftrack/riemann.hpp"

using namespace ftrack;

namespace {

// Deterministic uniform stream for the property tests.
struct SplitMix {
    std::uint64_t s;
    double next01() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * next01(); }
};

} // namespace

TEST_CASE("wave_h matches the two-branch definition") {
    CHECK(wave_h(0.0) == 0.0);
    CHECK(wave_h(0.5) == 0.5);
    CHECK(wave_h(-1.0) == doctest::Approx(std::sinh(-1.0)).epsilon(1e-15));
    CHECK(wave_h(-1.0) == doctest::Approx(-1.1752011936438014).epsilon(1e-12));

    SplitMix rng{7};
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-5.0, 5.0);
        CHECK(wave_h(x) * x >= 0.0);
        CHECK(std::fabs(x) <= std::fabs(wave_h(x)) + 1e-15);
    }
}

TEST_CASE("lax_state parametrizes both wave curves") {
    const LagState left{1.0, 0.0};

    const LagState same = lax_state(1, left, 0.0, 1.0);
    CHECK(same.u == 1.0);
    CHECK(same.v == 0.0);

    const LagState r1 = lax_state(1, left, 0.5, 1.0);
    CHECK(r1.u == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(r1.v == doctest::Approx(1.0).epsilon(1e-14));

    const LagState s2 = lax_state(2, left, -0.5, 1.0);
    CHECK(s2.u == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(s2.v == doctest::Approx(-2.0 * std::sinh(0.5)).epsilon(1e-14));
    CHECK(s2.v == doctest::Approx(-1.0421906109874948).epsilon(1e-12));

    CHECK_THROWS_AS(lax_state(1, LagState{-1.0, 0.0}, 0.1, 1.0), NonPositiveVolume);
}

TEST_CASE("solve_riemann on the worked examples") {
    SUBCASE("identical states produce no waves") {
        const WaveSizes ws = solve_riemann(LagState{1, 0}, LagState{1, 0}, 1.0);
        CHECK(ws.eps1 == 0.0);
        CHECK(ws.eps2 == 0.0);
        CHECK(ws.middle.u == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(ws.middle.v == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("single 1-rarefaction (inverse of the lax_state example)") {
        const WaveSizes ws = solve_riemann(LagState{1, 0}, LagState{std::exp(1.0), 1.0}, 1.0);
        CHECK(ws.eps1 == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(std::fabs(ws.eps2) < 1e-13);
    }
    SUBCASE("two shocks of strength -1/2 (composed shock curves)") {
        const double vr = -4.0 * std::sinh(0.5);
        const WaveSizes ws = solve_riemann(LagState{1, 0}, LagState{1, vr}, 1.0);
        CHECK(ws.eps1 == doctest::Approx(-0.5).epsilon(1e-13));
        CHECK(ws.eps2 == doctest::Approx(-0.5).epsilon(1e-13));
        CHECK(ws.middle.u == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
        CHECK(ws.middle.v == doctest::Approx(-2.0 * std::sinh(0.5)).epsilon(1e-13));
    }
    SUBCASE("vacuum-adjacent input is rejected") {
        CHECK_THROWS_AS(solve_riemann(LagState{0.0, 0.0}, LagState{1, 0}, 1.0), NonPositiveVolume);
    }
}

TEST_CASE("speeds: shocks, characteristics, admissibility") {
    CHECK(shock_speed(2, 1.0, 1.0, 1.0) == 1.0);
    CHECK(shock_speed(2, 1.0, std::exp(1.0), 1.0) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(shock_speed(1, 4.0, 1.0, 2.0) == doctest::Approx(-1.0).epsilon(1e-14));

    CHECK(char_speed(2, LagState{1, 0}, 1.0) == 1.0);
    CHECK(char_speed(1, LagState{2, 5}, 1.0) == -0.5);
    CHECK(char_speed(2, LagState{0.5, 0}, 2.0) == 4.0);

    // Lax admissibility surrogate: shock speed strictly between the
    // characteristic speeds of the two flanking volumes.
    SplitMix rng{11};
    for (int i = 0; i < 1000; ++i) {
        const double ul = std::exp(rng.uniform(-3, 3));
        const double ur = std::exp(rng.uniform(-3, 3));
        if (ul == ur) continue;
        const double s = std::fabs(shock_speed(2, ul, ur, 1.0));
        CHECK(s > 1.0 / std::max(ul, ur));
        CHECK(s < 1.0 / std::min(ul, ur));
    }
}

TEST_CASE("Riemann identities and size bound over random states") {
    SplitMix rng{42};
    const double alphas[3] = {0.5, 1.0, 2.0};
    for (int i = 0; i < 10000; ++i) {
        const LagState l{std::exp(rng.uniform(-3, 3)), rng.uniform(-3, 3)};
        const LagState r{std::exp(rng.uniform(-3, 3)), rng.uniform(-3, 3)};
        const double alpha = alphas[i % 3];
        const WaveSizes ws = solve_riemann(l, r, alpha);

        // eps2 - eps1 = (1/2) ln(u_l/u_r), exact up to representation.
        CHECK(std::fabs((ws.eps2 - ws.eps1) - 0.5 * std::log(l.u / r.u)) <= 1e-12);
        // h(eps1)+h(eps2) = (v_r - v_l)/(2 alpha).
        CHECK(std::fabs(wave_h(ws.eps1) + wave_h(ws.eps2) - (r.v - l.v) / (2 * alpha)) <= 1e-12);
        // |eps1| + |eps2| <= max{ ... }.
        const double bound = std::max(0.5 * std::fabs(std::log(r.u / l.u)),
                                      std::fabs(r.v - l.v) / (2 * alpha));
        CHECK(std::fabs(ws.eps1) + std::fabs(ws.eps2) <= bound + 1e-12);
        // Opposite-sign case collapses to the exact difference.
        if (ws.eps1 * ws.eps2 <= 0.0) {
            CHECK(std::fabs(ws.eps1) + std::fabs(ws.eps2) ==
                  doctest::Approx(std::fabs(ws.eps2 - ws.eps1)).epsilon(1e-15));
        }
        // Round trip through the middle state.
        const LagState back = lax_state(2, ws.middle, ws.eps2, alpha);
        CHECK(back.u == doctest::Approx(r.u).epsilon(1e-10));
        CHECK(back.v == doctest::Approx(r.v).epsilon(1e-10));
    }
}

TEST_CASE("assigned speeds follow the construction") {
    const LagState l{1.0, 0.0};
    const LagState r_shock = lax_state(1, l, -0.4, 1.0);
    CHECK(assigned_speed(1, -0.4, l, r_shock, 1.0) ==
          doctest::Approx(shock_speed(1, l.u, r_shock.u, 1.0)).epsilon(1e-15));
    const LagState r_raref = lax_state(1, l, 0.4, 1.0);
    CHECK(assigned_speed(1, 0.4, l, r_raref, 1.0) ==
          doctest::Approx(-1.0 / r_raref.u).epsilon(1e-15));
}
