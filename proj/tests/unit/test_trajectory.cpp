#include <cmath>

#include "doctest.h"

#include "avmerge/harness.hpp"
#include "avmerge/trajectory.hpp"

using namespace avmerge;

namespace {

const ConstraintLimits kLimits{0.0, 33.0, -7.0, 3.3, 1.0, 1.0, 5.0};

}  // namespace

TEST_CASE("uniform motion solves to the constant-speed line") {
    const auto c = solve_coefficients(0.0, 20.0, 0.0, 400.0, 20.0, 20.0);
    CHECK(std::abs(c.a0) <= 1e-12);
    CHECK(std::abs(c.b0) <= 1e-12);
    CHECK(c.c0 == doctest::Approx(20.0));
    CHECK(std::abs(c.d0) <= 1e-9);

    const auto mid = eval(c, 10.0);
    CHECK(std::abs(mid.u) <= 1e-12);
    CHECK(mid.v == doctest::Approx(20.0));
    CHECK(mid.x == doctest::Approx(200.0));
}

TEST_CASE("rest-to-rest cubic") {
    const auto c = solve_coefficients(0.0, 0.0, 0.0, 100.0, 0.0, 10.0);
    CHECK(c.a0 == doctest::Approx(-1.2));
    CHECK(c.b0 == doctest::Approx(6.0));
    CHECK(std::abs(c.c0) <= 1e-12);
    CHECK(std::abs(c.d0) <= 1e-12);

    // Midpoint: zero control, peak speed 1.5x the mean, half the distance.
    const auto mid = eval(c, 5.0);
    CHECK(std::abs(mid.u) <= 1e-12);
    CHECK(mid.v == doctest::Approx(15.0));
    CHECK(mid.x == doctest::Approx(50.0));

    const auto end = eval(c, 10.0);
    CHECK(end.x == doctest::Approx(100.0));
    CHECK(std::abs(end.v) <= 1e-9);
}

TEST_CASE("degenerate horizon rejected") {
    CHECK_THROWS_AS(solve_coefficients(0.0, 5.0, 1.0, 100.0, 5.0, 1.0 + 1e-12),
                    DegenerateHorizon);
    CHECK_THROWS_AS(energy_closed_form(0.0, 5.0, 1.0, 100.0, 5.0, 1.0), DegenerateHorizon);
}

TEST_CASE("evaluation outside the horizon rejected") {
    const auto c = solve_coefficients(0.0, 0.0, 0.0, 100.0, 0.0, 10.0);
    CHECK_THROWS_AS(eval(c, -0.5), std::out_of_range);
    CHECK_THROWS_AS(eval(c, 10.5), std::out_of_range);
    CHECK_NOTHROW(eval(c, 10.0));
}

TEST_CASE("time shift moves the trajectory rigidly") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const double t0 = rng.uniform(0.0, 30.0);
        const double T = rng.uniform(1.0, 40.0);
        const double x0 = rng.uniform(0.0, 100.0);
        const double L = x0 + rng.uniform(30.0, 500.0);
        const double v0 = rng.uniform(0.0, 33.0);
        const double v_m = rng.uniform(0.0, 33.0);
        const double shift = rng.uniform(-20.0, 40.0);
        if (t0 + shift < 0.0) continue;

        const auto base = solve_coefficients(x0, v0, t0, L, v_m, t0 + T);
        const auto moved = solve_coefficients(x0, v0, t0 + shift, L, v_m, t0 + shift + T);
        for (double frac : {0.0, 0.25, 0.6, 1.0}) {
            const auto a = eval(base, t0 + frac * T);
            const auto b = eval(moved, t0 + shift + frac * T);
            CHECK(std::abs(a.u - b.u) <= 1e-7 * std::max(1.0, std::abs(a.u)));
            CHECK(std::abs(a.v - b.v) <= 1e-7 * std::max(1.0, std::abs(a.v)));
            CHECK(std::abs(a.x - b.x) <= 1e-7 * std::max(1.0, std::abs(a.x)));
        }
    }
}

TEST_CASE("derivative consistency by central differences") {
    Rng rng(23);
    const double h = 1e-4;
    for (int trial = 0; trial < 50; ++trial) {
        const double t0 = rng.uniform(0.0, 20.0);
        const double T = rng.uniform(2.0, 40.0);
        const auto c = solve_coefficients(rng.uniform(0.0, 50.0), rng.uniform(0.0, 30.0),
                                          t0, rng.uniform(100.0, 500.0),
                                          rng.uniform(0.0, 30.0), t0 + T);
        for (double frac : {0.2, 0.5, 0.8}) {
            const double t = t0 + frac * T;
            const auto lo = eval(c, t - h);
            const auto hi = eval(c, t + h);
            const auto at = eval(c, t);
            const double dx = (hi.x - lo.x) / (2.0 * h);
            const double dv = (hi.v - lo.v) / (2.0 * h);
            CHECK(std::abs(dx - at.v) <= 1e-5 * std::max(1.0, std::abs(at.v)));
            CHECK(std::abs(dv - at.u) <= 1e-5 * std::max(1.0, std::abs(at.u)));
        }
    }
}

TEST_CASE("zero-control energy vanishes") {
    CHECK(std::abs(energy_closed_form(0.0, 25.0, 0.0, 400.0, 25.0, 16.0)) <= 1e-9);
}

TEST_CASE("rest-to-rest energy in closed form and by quadrature") {
    CHECK(energy_closed_form(0.0, 0.0, 0.0, 100.0, 0.0, 10.0) == doctest::Approx(60.0));
    const auto c = solve_coefficients(0.0, 0.0, 0.0, 100.0, 0.0, 10.0);
    CHECK(energy_quadrature(c) == doctest::Approx(60.0).epsilon(1e-12));

    const auto cruise = solve_coefficients(0.0, 25.0, 0.0, 400.0, 25.0, 16.0);
    CHECK(std::abs(energy_quadrature(cruise)) <= 1e-18);
}

TEST_CASE("closed form matches quadrature on random instances") {
    Rng rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const double t0 = rng.uniform(0.0, 50.0);
        const double T = rng.uniform(0.5, 60.0);
        const double x0 = rng.uniform(0.0, 200.0);
        const double L = x0 + rng.uniform(20.0, 800.0);
        const double v0 = rng.uniform(0.0, 35.0);
        const double v_m = rng.uniform(0.0, 35.0);
        const double cf = energy_closed_form(x0, v0, t0, L, v_m, t0 + T);
        const double q = energy_quadrature(solve_coefficients(x0, v0, t0, L, v_m, t0 + T));
        CHECK(std::abs(cf - q) / std::max(1.0, q) < 1e-9);
        CHECK(cf >= -1e-9);
    }
}

TEST_CASE("energy curve coefficients recovered by regression") {
    Rng rng(37);
    for (int trial = 0; trial < 40; ++trial) {
        const double x0 = rng.uniform(0.0, 100.0);
        const double L = x0 + rng.uniform(50.0, 600.0);
        const double v0 = rng.uniform(1.0, 33.0);
        const double v_m = rng.uniform(1.0, 33.0);
        const EnergyCurve curve = energy_curve(x0, v0, L, v_m);

        // Three samples of T^3 * E(T) determine the quadratic exactly.
        const double ts[3] = {3.0, 7.0, 13.0};
        double y[3];
        for (int i = 0; i < 3; ++i)
            y[i] = energy_closed_form(x0, v0, 0.0, L, v_m, ts[i]) * ts[i] * ts[i] * ts[i];
        const double a =
            ((y[2] - y[0]) / (ts[2] - ts[0]) - (y[1] - y[0]) / (ts[1] - ts[0])) /
            (ts[2] - ts[1]);
        const double b = (y[1] - y[0]) / (ts[1] - ts[0]) - a * (ts[0] + ts[1]);
        const double c = y[0] - a * ts[0] * ts[0] - b * ts[0];
        CHECK(a == doctest::Approx(curve.A1).epsilon(1e-7));
        CHECK(b == doctest::Approx(curve.A2).epsilon(1e-7));
        CHECK(c == doctest::Approx(curve.A3).epsilon(1e-7));
        CHECK(curve.A1 > 0.0);
        CHECK(curve.A2 < 0.0);
        CHECK(curve.A3 > 0.0);
    }
}

TEST_CASE("stationary travel time has a closed algebraic twin") {
    Rng rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        const double x0 = rng.uniform(0.0, 100.0);
        const double L = x0 + rng.uniform(50.0, 600.0);
        const double v0 = rng.uniform(1.0, 33.0);
        const double v_m = rng.uniform(1.0, 33.0);
        const double tau = energy_curve(x0, v0, L, v_m).tau1();
        const double twin = 3.0 * (L - x0) / (v0 + v_m + std::sqrt(v0 * v_m));
        CHECK(tau == doctest::Approx(twin).epsilon(1e-9));
    }
}

TEST_CASE("feasibility audit uses exact extrema") {
    const auto cruise = solve_coefficients(0.0, 20.0, 0.0, 400.0, 20.0, 20.0);
    CHECK(feasibility(cruise, kLimits).ok());

    ConstraintLimits tight = kLimits;
    tight.u_max = 3.0;
    const auto rest = solve_coefficients(0.0, 0.0, 0.0, 100.0, 0.0, 10.0);
    const auto report = feasibility(rest, tight);
    CHECK_FALSE(report.accel_ok);
    CHECK(report.u_high == doctest::Approx(6.0));
    CHECK(report.u_low == doctest::Approx(-6.0));

    // Dip below both endpoint speeds: interior vertex must be caught.
    const auto dip = solve_coefficients(0.0, 20.0, 0.0, 100.0, 20.0, 10.0);
    const auto dip_report = feasibility(dip, kLimits);
    CHECK(dip_report.v_low < 20.0 - 1.0);
    CHECK(dip_report.v_low < std::min(eval(dip, 0.0).v, eval(dip, 10.0).v));
}

TEST_CASE("speed-profile admissibility matches the audit's speed half") {
    Rng rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        const double t0 = rng.uniform(0.0, 20.0);
        const double T = rng.uniform(1.0, 40.0);
        const double x0 = rng.uniform(0.0, 100.0);
        const double L = x0 + rng.uniform(30.0, 500.0);
        const double v0 = rng.uniform(0.0, 33.0);
        const double v_m = rng.uniform(0.0, 33.0);
        const bool fast = speed_within_limits(x0, v0, t0, L, v_m, t0 + T, kLimits);
        const auto full =
            feasibility(solve_coefficients(x0, v0, t0, L, v_m, t0 + T), kLimits);
        CHECK(fast == full.speed_ok);
    }
}
