#include <cmath>
#include <cstdint>
#include <doctest.h>

#include "ftrack/splitting.hpp"

using namespace ftrack;

namespace {

WavePattern single_front_pattern(int family, double eps, double alpha = 1.0) {
    WavePattern p;
    p.alpha = alpha;
    p.M = 1.0;
    p.eta = 0.5;
    p.cells.push_back(LagState{1.0, 0.0});
    Front f;
    f.id = p.next_id++;
    f.y = 0.5;
    f.family = family;
    f.eps = eps;
    f.kind = kind_of(eps);
    f.gen = 2;
    const LagState right = lax_state(family, p.cells.back(), eps, alpha);
    f.speed = assigned_speed(family, eps, p.cells.back(), right, alpha);
    f.stamp = p.next_seq++;
    p.fronts.push_back(f);
    p.cells.push_back(right);
    p.rebuild_index();
    p.schedule_all();
    return p;
}

} // namespace

TEST_CASE("timestep_bounds evaluates the sandwich constants") {
    const TimestepBounds b0 = timestep_bounds(0.0);
    CHECK(b0.c1 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(b0.C1_plus == 0.5);
    CHECK(b0.C1_minus == doctest::Approx(0.5).epsilon(1e-15));

    const TimestepBounds b1 = timestep_bounds(1.0);
    CHECK(b1.c1 == doctest::Approx(1.0 / (1.0 + std::cosh(1.0))).epsilon(1e-15));
    CHECK(b1.c1 == doctest::Approx(0.3932238).epsilon(1e-6));
    CHECK(b1.C1_minus == doctest::Approx(0.7715403).epsilon(1e-6));

    const TimestepBounds b2 = timestep_bounds(2.0);
    CHECK(b2.c1 == doctest::Approx(0.2099872).epsilon(1e-6));
    CHECK(b2.C1_minus == doctest::Approx(1.8810978).epsilon(1e-6));

    CHECK_THROWS_AS(timestep_bounds(-1.0), NonPositiveInput);
}

TEST_CASE("damp_velocities scales every cell velocity") {
    WavePattern p = single_front_pattern(2, -0.5);
    const double v0 = p.cells[0].v, v1 = p.cells[1].v;

    SUBCASE("dt = 0 leaves the pattern unchanged") {
        damp_velocities(p, 1.0, 0.0);
        CHECK(p.cells[0].v == v0);
        CHECK(p.cells[1].v == v1);
    }
    SUBCASE("direct formula") {
        p.cells[0].v = 2.0;
        damp_velocities(p, 1.0, 0.01);
        CHECK(p.cells[0].v == doctest::Approx(1.98).epsilon(1e-15));
        CHECK(p.cells[1].v == doctest::Approx(v1 * 0.99).epsilon(1e-15));
        CHECK(p.cells[0].u == 1.0);  // u untouched
    }
    SUBCASE("M dt >= 1 is rejected") {
        CHECK_THROWS_AS(damp_velocities(p, 1.0, 1.0), TimeStepTooLarge);
    }
}

TEST_CASE("implicit_split solves the scalar time-step equation") {
    CHECK(implicit_split(0.0, 0.1, 1.0) == 0.0);
    CHECK(implicit_split(0.5, 0.0, 1.0) == 0.0);

    SUBCASE("x = 0.5, M s = 0.01 lands in the Prop. 2.5 window") {
        const double y = implicit_split(0.5, 0.01, 1.0);
        CHECK(y < 0.0);
        CHECK(y > -0.5);  // Appendix bracket -x < y < 0
        const double ratio = std::fabs(y) / (0.01 * 0.5);
        const TimestepBounds b = timestep_bounds(0.5);
        CHECK(ratio >= b.c1 * (1 - 1e-12));
        CHECK(ratio <= b.C1_plus * (1 + 1e-12));
        // Residual of the defining equation.
        const double res = wave_h(y) + wave_h(0.5 + y) - wave_h(0.5) * 0.99;
        CHECK(std::fabs(res) <= 1e-13);
    }
    SUBCASE("negative strengths mirror") {
        const double y = implicit_split(-0.5, 0.01, 1.0);
        CHECK(y > 0.0);
        CHECK(y < 0.5);
        const double ratio = y / (0.01 * 0.5);
        const TimestepBounds b = timestep_bounds(0.5);
        CHECK(ratio >= b.c1 * (1 - 1e-12));
        CHECK(ratio <= b.C1_minus * (1 + 1e-12));
    }
    CHECK_THROWS_AS(implicit_split(0.5, 2.0, 1.0), TimeStepTooLarge);
}

TEST_CASE("resolve_time_step splits every front with exact bookkeeping") {
    SUBCASE("dt = 0: transmitted wave only") {
        WavePattern p = single_front_pattern(2, 0.5);
        const auto out = resolve_time_step(p, 1.0, 0.0);
        REQUIRE(out.size() == 1);
        CHECK(out[0].eps_same == 0.5);
        CHECK(out[0].eps_refl == 0.0);
        CHECK(p.fronts.size() == 1);
    }
    SUBCASE("2-wave eps = 0.5, M dt = 0.01") {
        WavePattern p = single_front_pattern(2, 0.5);
        const auto out = resolve_time_step(p, 1.0, 0.01);
        REQUIRE(out.size() == 1);
        const SplitOutcome& oc = out[0];
        // Sign rules of Prop. 2.4(b).
        CHECK(oc.eps_refl * oc.eps_in < 0.0);
        CHECK(oc.eps_same * oc.eps_in > 0.0);
        // Sandwich with q = 1 >= |eps|.
        const TimestepBounds b = timestep_bounds(1.0);
        const double ratio = std::fabs(oc.eps_refl) / (0.01 * 0.5);
        CHECK(ratio >= b.c1);
        CHECK(ratio <= b.C1_plus);
        // Exact conservation and generation bookkeeping.
        CHECK(std::fabs(oc.eps_same) + std::fabs(oc.eps_refl) ==
              doctest::Approx(0.5).epsilon(1e-15));
        CHECK(oc.gen_same == 2);
        CHECK(oc.gen_refl == 3);
        // Equivalence with the implicit-function oracle.
        CHECK(oc.eps_refl == doctest::Approx(implicit_split(0.5, 0.01, 1.0)).epsilon(1e-10));
        // Pattern: reflected 1-wave first, transmitted 2-wave second, both
        // parked at the parent's position.
        REQUIRE(p.fronts.size() == 2);
        CHECK(p.fronts[0].family == 1);
        CHECK(p.fronts[0].gen == 3);
        CHECK(p.fronts[1].family == 2);
        CHECK(p.fronts[1].gen == 2);
        CHECK(p.fronts[0].y == p.fronts[1].y);
        CHECK(p.fronts[0].speed < 0.0);
        CHECK(p.fronts[1].speed > 0.0);
        CHECK(p.consistency_error() < 1e-13);
    }
    SUBCASE("1-wave mirror image") {
        WavePattern p = single_front_pattern(1, -0.4);
        const auto out = resolve_time_step(p, 1.0, 0.02);
        REQUIRE(out.size() == 1);
        const SplitOutcome& oc = out[0];
        CHECK(oc.eps_refl > 0.0);
        CHECK(oc.eps_same < 0.0);
        CHECK(std::fabs(oc.eps_same) + std::fabs(oc.eps_refl) ==
              doctest::Approx(0.4).epsilon(1e-15));
        CHECK(oc.eps_refl == doctest::Approx(implicit_split(-0.4, 0.02, 1.0)).epsilon(1e-10));
        REQUIRE(p.fronts.size() == 2);
        CHECK(p.fronts[0].family == 1);
        CHECK(p.fronts[0].gen == 2);  // transmitted keeps the generation
        CHECK(p.fronts[1].family == 2);
        CHECK(p.fronts[1].gen == 3);
        CHECK(p.consistency_error() < 1e-13);
    }
    SUBCASE("damping with all v equal leaves a stationary datum stationary") {
        WavePattern p;
        p.alpha = 1.0;
        p.M = 1.0;
        p.eta = 0.5;
        p.cells.push_back(LagState{2.0, 0.0});
        const auto out = resolve_time_step(p, 1.0, 0.05);
        CHECK(out.empty());
        CHECK(p.fronts.empty());
        CHECK(p.cells[0].v == 0.0);
    }
}

TEST_CASE("split sandwich holds across random strengths, steps, families") {
    std::uint64_t s = 123;
    auto next01 = [&s]() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 400; ++trial) {
        const int family = trial % 2 ? 1 : 2;
        const double eps = (next01() * 2.0 - 1.0) * 1.5;
        if (std::fabs(eps) < 1e-6) continue;
        const double dt = 0.001 + 0.1 * next01();
        WavePattern p = single_front_pattern(family, eps);
        const auto out = resolve_time_step(p, 1.0, dt);
        const SplitOutcome& oc = out[0];
        const double q = std::fabs(eps);
        const TimestepBounds b = timestep_bounds(q);
        const double ratio = std::fabs(oc.eps_refl) / (dt * q);
        CHECK(ratio >= b.c1 * (1 - 1e-9));
        CHECK(ratio <= (oc.eps_in > 0 ? b.C1_plus : b.C1_minus) * (1 + 1e-9));
        CHECK(std::fabs(std::fabs(oc.eps_same) + std::fabs(oc.eps_refl) - q) < 1e-15);
        CHECK(oc.eps_refl == doctest::Approx(implicit_split(eps, dt, 1.0)).epsilon(1e-10));
    }
}
