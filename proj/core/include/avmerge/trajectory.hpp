#pragma once

#include <stdexcept>

#include "avmerge/types.hpp"

namespace avmerge {

// Minimum-effort trajectory between fixed endpoint states: linear control,
// quadratic speed, cubic position, all in absolute time.
//   u(t) = a0*t + b0
//   v(t) = a0*t^2/2 + b0*t + c0
//   x(t) = a0*t^3/6 + b0*t^2/2 + c0*t + d0
struct TrajectoryCoefficients {
    double a0 = 0.0;  // [m/s^3]
    double b0 = 0.0;  // [m/s^2]
    double c0 = 0.0;  // [m/s]
    double d0 = 0.0;  // [m]
    double valid_from = 0.0;  // [s]
    double valid_to = 0.0;    // [s]
};

struct Kinematics {
    double u = 0.0;  // [m/s^2]
    double v = 0.0;  // [m/s]
    double x = 0.0;  // [m]
};

class DegenerateHorizon : public std::domain_error {
  public:
    DegenerateHorizon() : std::domain_error("trajectory horizon below 1e-9 s") {}
};

// Coefficients meeting x(t0)=x0, v(t0)=v0, x(t_m)=L, v(t_m)=v_m exactly.
// Solved in shifted time for conditioning, then translated back.
TrajectoryCoefficients solve_coefficients(double x0, double v0, double t0,
                                          double L, double v_m, double t_m);

// Throws std::out_of_range outside [valid_from, valid_to].
Kinematics eval(const TrajectoryCoefficients& coeffs, double t);

// Control effort integral(u^2/2) of the solved trajectory, in closed form.
double energy_closed_form(double x0, double v0, double t0,
                          double L, double v_m, double t_m);

// Same integral by fixed 3-point Gauss quadrature; the integrand is an exact
// quadratic, so this is exact up to rounding and serves as the oracle.
double energy_quadrature(const TrajectoryCoefficients& coeffs);

// Closed-form energy as a function of travel time T for fixed endpoints:
//   E(T) = (A1*T^2 + A2*T + A3) / T^3.
// tau1 is the first stationary point; E is strictly decreasing below it.
struct EnergyCurve {
    double A1 = 0.0;  // 2*(v0^2 + v0*v_m + v_m^2), >= 0
    double A2 = 0.0;  // -6*(L - x0)*(v0 + v_m), <= 0
    double A3 = 0.0;  // 6*(L - x0)^2, >= 0

    double value(double T) const;
    double tau1() const;  // +inf when the curve has no stationary point
};

EnergyCurve energy_curve(double x0, double v0, double L, double v_m);

// Speed/acceleration audit over the whole horizon using exact polynomial
// extrema (u is affine, v is quadratic); no sampling involved.
struct FeasibilityReport {
    bool speed_ok = false;
    bool accel_ok = false;
    double v_low = 0.0;   // [m/s] attained minimum
    double v_high = 0.0;  // [m/s] attained maximum
    double u_low = 0.0;   // [m/s^2] attained minimum
    double u_high = 0.0;  // [m/s^2] attained maximum

    bool ok() const { return speed_ok && accel_ok; }
};

FeasibilityReport feasibility(const TrajectoryCoefficients& coeffs,
                              const ConstraintLimits& limits);

// Whether the speed profile of the endpoint-to-endpoint solution stays in
// [v_min, v_max] for the whole horizon. Speed limits constrain the inner
// minimization itself; acceleration limits are only audited afterwards.
bool speed_within_limits(double x0, double v0, double t0, double L, double v_m,
                         double t_m, const ConstraintLimits& limits);

}  // namespace avmerge
