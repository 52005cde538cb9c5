#pragma once

#include "avmerge/types.hpp"

namespace avmerge {

// Aggregate HDV-side cost of a merge: the fleet's undisrupted travel time
// plus the extra time and energy caused by the AV slotting in at index k.
struct HdvCost {
    double undisrupted_time_sum = 0.0;  // [s]
    double time_disruption = 0.0;       // [s], >= 0; exactly 0 for k = N+1
    double energy_disruption = 0.0;     // >= 0; exactly 0 for k = N+1
};

// Time for HDV i to cruise from its observed position to the merge point.
double undisrupted_travel_time(int hdv_index, const Scenario& scenario);

// Extra time an HDV loses braking from v_d to the AV's merging speed and
// recovering at rate u_bar. Zero when the AV merges at or above v_d.
double base_time_disruption(double v_d, double v_m, double u_bar);

// Extra control effort of the same brake/recover maneuver.
double base_energy_disruption(double v_d, double v_m, double u_bar);

// exp(-beta * z): attenuation of a disruption felt z meters further back.
double discount_factor(double beta, double z);

// Full HDV cost for merging as the k-th vehicle at (t_m, v_m). HDVs ahead of
// the slot are untouched; HDV k takes the base disruption; HDVs behind take
// it attenuated by their distance to HDV k at the merging time.
HdvCost hdv_cost(int k, double v_m, double t_m, const Scenario& scenario);

}  // namespace avmerge
