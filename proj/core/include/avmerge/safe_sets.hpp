#pragma once

#include <optional>

#include "avmerge/types.hpp"

namespace avmerge {

// t = slope * v_m + intercept. The admissible-merging-time lower bound is
// affine in the merging velocity, so it is kept symbolic for the optimizer.
struct AffineTime {
    double slope = 0.0;      // [s / (m/s)]
    double intercept = 0.0;  // [s]
    double operator()(double v_m) const { return slope * v_m + intercept; }
};

// Admissible (merging time, merging velocity) region for sequence index k:
//   0 <= v_m <= v_upper,  t_lower(v_m) <= t_m <= t_upper.
// k = 1 has no leading HDV (t_lower == t0, v capped only by v_max);
// k = N+1 has no trailing HDV (t_upper unbounded).
struct SafeWindow {
    int k = 0;
    double v_upper = 0.0;
    AffineTime t_lower;
    std::optional<double> t_upper;

    // t_upper when bounded; otherwise a finite horizon that always leaves a
    // full search span past the earliest admissible time.
    double search_time_limit(const Scenario& scenario) const;
};

// Constant-speed position of HDV i at time t >= t0.
double hdv_position_at(int hdv_index, double t, const Scenario& scenario);

// Window for index k, with the inter-HDV gap evaluated at t_probe (the gap
// is time-invariant when neighbor speeds are equal). Returns nullopt when
// the window is empty: no positive merging speed or no admissible time.
std::optional<SafeWindow> safe_window(int k, double t_probe, const Scenario& scenario);

// Horizon used when t_upper is unbounded: three cruise travel times.
double search_time_cap(const Scenario& scenario);

// Pointwise audit of the merging-gap constraints at (t_m, v_m), with the AV
// at the merge point. Components are vacuously true for absent neighbors;
// margins are slack (negative = violated).
struct GapCheck {
    bool ok = false;        // combined gap constraint
    bool lead_ok = false;   // AV keeps phi_c * v_m + delta behind HDV k-1
    bool trail_ok = false;  // HDV k keeps phi_h * v_d + delta behind the AV
    double lead_margin = 0.0;
    double trail_margin = 0.0;
    double combined_margin = 0.0;
};

GapCheck check_safe_gap(int k, double t_m, double v_m, const Scenario& scenario);

}  // namespace avmerge
