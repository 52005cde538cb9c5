#include <cmath>

#include "doctest.h"

#include "avmerge/harness.hpp"
#include "avmerge/safe_sets.hpp"
#include "test_support.hpp"

using namespace avmerge;

TEST_CASE("constant-speed HDV positions") {
    Scenario sc = test::platoon(1, 100.0, 0.0, 25.0);
    CHECK(hdv_position_at(1, 4.0, sc) == doctest::Approx(200.0));
    CHECK(hdv_position_at(1, 0.0, sc) == doctest::Approx(100.0));
    sc.hdvs[0] = {{0.0, 30.0}, 30.0};
    CHECK(hdv_position_at(1, 10.0, sc) == doctest::Approx(300.0));
    CHECK_THROWS_AS(hdv_position_at(1, -1.0, sc), std::domain_error);
    CHECK_THROWS_AS(hdv_position_at(2, 1.0, sc), std::out_of_range);
}

TEST_CASE("interior window bound") {
    // Gap 60 m, phi = 1, delta = 5, v_d = 30: (60 - 30 - 10) / 1 = 20.
    Scenario sc = test::platoon(2, 300.0, 60.0, 30.0);
    const auto window = safe_window(2, sc.t0, sc);
    REQUIRE(window);
    CHECK(window->v_upper == doctest::Approx(20.0));
    REQUIRE(window->t_upper);
    // Trailing HDV 2 at 240: (400 - 30 - 5 - 240) / 30.
    CHECK(*window->t_upper == doctest::Approx(125.0 / 30.0));
    // Leading HDV 1 at 300: t_lower(v) = (400 + v + 5 - 300) / 30.
    CHECK(window->t_lower(0.0) == doctest::Approx(105.0 / 30.0));
    CHECK(window->t_lower(20.0) == doctest::Approx(125.0 / 30.0));
}

TEST_CASE("last index is unconstrained above") {
    const Scenario sc = test::platoon(2, 300.0, 60.0, 30.0);
    const auto window = safe_window(3, sc.t0, sc);
    REQUIRE(window);
    CHECK(window->v_upper == doctest::Approx(sc.limits.v_max));
    CHECK_FALSE(window->t_upper);
    CHECK(window->search_time_limit(sc) >= search_time_cap(sc));
}

TEST_CASE("gap too small for any positive merging speed") {
    // Gap 40 = phi_h*v_d + 2*delta exactly: raw bound 0, window empty.
    const Scenario sc = test::platoon(2, 300.0, 40.0, 30.0);
    CHECK_FALSE(safe_window(2, sc.t0, sc));
}

TEST_CASE("trailing HDV too close to the merge point empties slot 1") {
    // HDV 1 inside the envelope: t_upper < t0.
    const Scenario sc = test::platoon(1, 370.0, 0.0, 30.0);
    CHECK_FALSE(safe_window(1, sc.t0, sc));
}

TEST_CASE("first slot has no lower time bound beyond t0") {
    const Scenario sc = test::platoon(2, 300.0, 60.0, 30.0);
    const auto window = safe_window(1, sc.t0, sc);
    REQUIRE(window);
    CHECK(window->t_lower(25.0) == doctest::Approx(sc.t0));
    CHECK(window->v_upper == doctest::Approx(sc.limits.v_max));
}

TEST_CASE("uniform platoon: shared interior bound and slot spacing") {
    const Scenario sc = test::platoon(5, 320.0, 55.0, 28.0);
    const double z_over_vd = 55.0 / 28.0;
    double shared = -1.0;
    double prev_upper = 0.0;
    for (int k = 1; k <= 5; ++k) {
        const auto window = safe_window(k, sc.t0, sc);
        REQUIRE(window);
        if (k >= 2) {
            if (shared < 0.0)
                shared = window->v_upper;
            else
                CHECK(window->v_upper == doctest::Approx(shared).epsilon(1e-12));
        }
        REQUIRE(window->t_upper);
        if (k >= 2)
            CHECK(*window->t_upper - prev_upper ==
                  doctest::Approx(z_over_vd).epsilon(1e-9));
        prev_upper = *window->t_upper;
    }
}

TEST_CASE("gap audit against hand values") {
    // HDV 1 at 355 and v_d 30: at t_m = 1 it sits at 385, i.e. 15 m short of
    // the merge point while needing 35: trailing side fails.
    Scenario sc = test::platoon(1, 355.0, 0.0, 30.0);
    const GapCheck bad = check_safe_gap(1, 1.0, 10.0, sc);
    CHECK_FALSE(bad.trail_ok);
    CHECK_FALSE(bad.ok);
    CHECK(bad.trail_margin == doctest::Approx(-20.0));

    // Exactly on the boundary: gap equals phi_h*v_d + delta.
    sc.hdvs[0] = {{335.0, 30.0}, 30.0};
    const GapCheck edge = check_safe_gap(1, 1.0, 10.0, sc);
    CHECK(edge.trail_ok);
    CHECK(edge.ok);
    CHECK(edge.trail_margin == doctest::Approx(0.0));
}

TEST_CASE("combined inequality matches the two-vehicle hand case") {
    // Interior slot with gap 45 at the merging time, needing 10+30+10.
    Scenario sc = test::platoon(2, 340.0, 45.0, 30.0);
    const GapCheck check = check_safe_gap(2, 1.0, 10.0, sc);
    CHECK(check.combined_margin == doctest::Approx(-5.0));
    CHECK_FALSE(check.ok);
}

TEST_CASE("window samples always satisfy the gap audit") {
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        ScenarioRanges ranges;
        if (trial % 2 == 1) ranges.speed_jitter_frac = 0.12;
        const Scenario sc = random_scenario(rng.next_u64(), ranges);
        for (int k = 1; k <= sc.sequence_count(); ++k) {
            const auto window = safe_window(k, sc.t0, sc);
            if (!window) continue;
            const double t_hi = window->search_time_limit(sc);
            const double t_lo = std::max(window->t_lower(0.0), sc.t0);
            if (t_lo > t_hi) continue;
            const double t = t_lo + rng.uniform(0.0, 1.0) * (t_hi - t_lo);
            const auto at_t = safe_window(k, t, sc);
            if (!at_t) continue;
            double v_hi = at_t->v_upper;
            if (window->t_lower.slope > 0.0)
                v_hi = std::min(v_hi,
                                (t - window->t_lower.intercept) / window->t_lower.slope);
            if (v_hi < 0.0) continue;
            const double v = v_hi * rng.uniform(0.0, 1.0);
            CHECK(check_safe_gap(k, t, v, sc).ok);
        }
    }
}

TEST_CASE("search cap is three cruise times") {
    const Scenario sc = test::platoon(1, 300.0, 0.0, 25.0);
    CHECK(search_time_cap(sc) == doctest::Approx(sc.t0 + 3.0 * 400.0 / 20.0));
}
