#include "avmerge/disruption.hpp"

#include <cmath>
#include <stdexcept>

#include "avmerge/safe_sets.hpp"

namespace avmerge {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0))
        throw ValidationError(ScenarioError::NonPositiveParameter,
                              std::string(name) + " must be > 0");
}

}  // namespace

double undisrupted_travel_time(int hdv_index, const Scenario& scenario) {
    require_hdv_index(hdv_index, scenario);
    const auto& hdv = scenario.hdvs[static_cast<size_t>(hdv_index - 1)];
    return (scenario.control_zone_length - hdv.state.position) / hdv.desired_speed;
}

double base_time_disruption(double v_d, double v_m, double u_bar) {
    require_positive(v_d, "v_d");
    require_positive(u_bar, "u_bar");
    const double drop = std::max(v_d - v_m, 0.0);
    return drop * drop / (2.0 * u_bar * v_d);
}

double base_energy_disruption(double v_d, double v_m, double u_bar) {
    require_positive(v_d, "v_d");
    require_positive(u_bar, "u_bar");
    return 0.5 * u_bar * std::max(v_d - v_m, 0.0);
}

double discount_factor(double beta, double z) {
    if (beta <= 0.0 || beta >= 1.0)
        throw ValidationError(ScenarioError::NonPositiveParameter, "beta must be in (0,1)");
    if (z < 0.0)
        throw ValidationError(ScenarioError::NonPositiveParameter, "z must be >= 0");
    return std::exp(-beta * z);
}

HdvCost hdv_cost(int k, double v_m, double t_m, const Scenario& scenario) {
    require_sequence_index(k, scenario);
    const int n = scenario.hdv_count();

    HdvCost cost;
    for (int i = 1; i <= n; ++i)
        cost.undisrupted_time_sum += undisrupted_travel_time(i, scenario);
    if (k > n) return cost;  // merging last disturbs nobody

    // The directly disturbed HDV k sets the base magnitudes; its desired
    // speed is the reference even for the vehicles further back.
    const double v_d_k = scenario.hdvs[static_cast<size_t>(k - 1)].desired_speed;
    const double u_bar = scenario.model.u_bar;
    const double dt_base = base_time_disruption(v_d_k, v_m, u_bar);
    const double de_base = base_energy_disruption(v_d_k, v_m, u_bar);

    cost.time_disruption = dt_base;
    cost.energy_disruption = de_base;
    const double x_k_at_merge = hdv_position_at(k, t_m, scenario);
    for (int i = k + 1; i <= n; ++i) {
        // With unequal speeds a follower may have closed the whole gap by
        // t_m; no separation means no attenuation.
        const double z =
            std::max(x_k_at_merge - hdv_position_at(i, t_m, scenario), 0.0);
        const double gamma = discount_factor(scenario.model.beta, z);
        cost.time_disruption += gamma * dt_base;
        cost.energy_disruption += gamma * de_base;
    }
    return cost;
}

}  // namespace avmerge
