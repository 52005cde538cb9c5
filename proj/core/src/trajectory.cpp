#include "avmerge/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace avmerge {

namespace {

constexpr double kMinHorizon = 1e-9;  // [s]

double domain_tol(const TrajectoryCoefficients& c) {
    return 1e-9 * std::max(1.0, std::abs(c.valid_to - c.valid_from));
}

}  // namespace

TrajectoryCoefficients solve_coefficients(double x0, double v0, double t0,
                                          double L, double v_m, double t_m) {
    const double T = t_m - t0;
    if (!(T >= kMinHorizon)) throw DegenerateHorizon();

    // Shifted time tau = t - t0: d = x0, c = v0, and a 2x2 system for (a, b)
    // from the endpoint conditions.
    const double dx = L - x0 - v0 * T;   // position residual after cruising
    const double dv = v_m - v0;
    const double a = (6.0 * dv * T - 12.0 * dx) / (T * T * T);
    const double b = (6.0 * dx - 2.0 * dv * T) / (T * T);

    TrajectoryCoefficients c;
    c.a0 = a;
    c.b0 = b - a * t0;
    c.c0 = 0.5 * a * t0 * t0 - b * t0 + v0;
    c.d0 = -a * t0 * t0 * t0 / 6.0 + 0.5 * b * t0 * t0 - v0 * t0 + x0;
    c.valid_from = t0;
    c.valid_to = t_m;
    return c;
}

Kinematics eval(const TrajectoryCoefficients& coeffs, double t) {
    const double tol = domain_tol(coeffs);
    if (t < coeffs.valid_from - tol || t > coeffs.valid_to + tol)
        throw std::out_of_range("eval: time outside trajectory domain");
    Kinematics k;
    k.u = coeffs.a0 * t + coeffs.b0;
    k.v = (0.5 * coeffs.a0 * t + coeffs.b0) * t + coeffs.c0;
    k.x = ((coeffs.a0 * t / 6.0 + 0.5 * coeffs.b0) * t + coeffs.c0) * t + coeffs.d0;
    return k;
}

double energy_closed_form(double x0, double v0, double t0,
                          double L, double v_m, double t_m) {
    const double T = t_m - t0;
    if (!(T >= kMinHorizon)) throw DegenerateHorizon();
    const double D = L - x0;
    const double num = 2.0 * T * T * (v0 * v0 + v0 * v_m + v_m * v_m) -
                       6.0 * T * D * (v0 + v_m) + 6.0 * D * D;
    return num / (T * T * T);
}

double energy_quadrature(const TrajectoryCoefficients& coeffs) {
    // Gauss-Legendre, 3 nodes: exact for polynomials up to degree 5.
    static const double nodes[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

    const double mid = 0.5 * (coeffs.valid_from + coeffs.valid_to);
    const double half = 0.5 * (coeffs.valid_to - coeffs.valid_from);
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double u = coeffs.a0 * (mid + half * nodes[i]) + coeffs.b0;
        sum += weights[i] * 0.5 * u * u;
    }
    return sum * half;
}

double EnergyCurve::value(double T) const {
    return ((A1 * T + A2) * T + A3) / (T * T * T);
}

double EnergyCurve::tau1() const {
    if (A1 <= 0.0) return std::numeric_limits<double>::infinity();
    const double disc = std::max(A2 * A2 - 3.0 * A1 * A3, 0.0);
    return (-A2 - std::sqrt(disc)) / A1;
}

EnergyCurve energy_curve(double x0, double v0, double L, double v_m) {
    const double D = L - x0;
    EnergyCurve curve;
    curve.A1 = 2.0 * (v0 * v0 + v0 * v_m + v_m * v_m);
    curve.A2 = -6.0 * D * (v0 + v_m);
    curve.A3 = 6.0 * D * D;
    return curve;
}

bool speed_within_limits(double x0, double v0, double t0, double L, double v_m,
                         double t_m, const ConstraintLimits& limits) {
    const double T = t_m - t0;
    if (!(T >= kMinHorizon)) return false;
    const double dx = L - x0 - v0 * T;
    const double dv = v_m - v0;
    const double a = (6.0 * dv * T - 12.0 * dx) / (T * T * T);
    const double b = (6.0 * dx - 2.0 * dv * T) / (T * T);

    double v_lo = std::min(v0, v_m);
    double v_hi = std::max(v0, v_m);
    if (a != 0.0) {
        const double tau = -b / a;  // interior stationary point of v
        if (tau > 0.0 && tau < T) {
            const double v_tau = 0.5 * a * tau * tau + b * tau + v0;
            v_lo = std::min(v_lo, v_tau);
            v_hi = std::max(v_hi, v_tau);
        }
    }
    const double tol_lo = 1e-9 * std::max(1.0, std::abs(limits.v_min));
    const double tol_hi = 1e-9 * std::max(1.0, std::abs(limits.v_max));
    return v_lo >= limits.v_min - tol_lo && v_hi <= limits.v_max + tol_hi;
}

FeasibilityReport feasibility(const TrajectoryCoefficients& coeffs,
                              const ConstraintLimits& limits) {
    const double t0 = coeffs.valid_from;
    const double t1 = coeffs.valid_to;

    const double u_start = coeffs.a0 * t0 + coeffs.b0;
    const double u_end = coeffs.a0 * t1 + coeffs.b0;

    FeasibilityReport report;
    report.u_low = std::min(u_start, u_end);
    report.u_high = std::max(u_start, u_end);

    const double v_start = eval(coeffs, t0).v;
    const double v_end = eval(coeffs, t1).v;
    report.v_low = std::min(v_start, v_end);
    report.v_high = std::max(v_start, v_end);
    if (coeffs.a0 != 0.0) {
        const double t_vertex = -coeffs.b0 / coeffs.a0;  // where u = v' = 0
        if (t_vertex > t0 && t_vertex < t1) {
            const double v_vertex = eval(coeffs, t_vertex).v;
            report.v_low = std::min(report.v_low, v_vertex);
            report.v_high = std::max(report.v_high, v_vertex);
        }
    }

    const auto within = [](double lo, double hi, double lim_lo, double lim_hi) {
        const double tol_lo = 1e-9 * std::max(1.0, std::abs(lim_lo));
        const double tol_hi = 1e-9 * std::max(1.0, std::abs(lim_hi));
        return lo >= lim_lo - tol_lo && hi <= lim_hi + tol_hi;
    };
    report.speed_ok = within(report.v_low, report.v_high, limits.v_min, limits.v_max);
    report.accel_ok = within(report.u_low, report.u_high, limits.u_min, limits.u_max);
    return report;
}

}  // namespace avmerge
