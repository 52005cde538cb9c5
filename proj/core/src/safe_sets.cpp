#include "avmerge/safe_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace avmerge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double slack_tol(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

}  // namespace

double SafeWindow::search_time_limit(const Scenario& scenario) const {
    if (t_upper) return *t_upper;
    const double cap = search_time_cap(scenario);
    return std::max(cap, t_lower(v_upper) + (cap - scenario.t0));
}

double hdv_position_at(int hdv_index, double t, const Scenario& scenario) {
    require_hdv_index(hdv_index, scenario);
    if (t < scenario.t0)
        throw std::domain_error("hdv_position_at: time before observation instant");
    const auto& hdv = scenario.hdvs[static_cast<size_t>(hdv_index - 1)];
    return hdv.state.position + (t - scenario.t0) * hdv.desired_speed;
}

double search_time_cap(const Scenario& scenario) {
    const double distance = scenario.control_zone_length - scenario.av.position;
    return scenario.t0 + 3.0 * distance / std::max(scenario.av.velocity, 1.0);
}

std::optional<SafeWindow> safe_window(int k, double t_probe, const Scenario& scenario) {
    require_sequence_index(k, scenario);
    if (t_probe < scenario.t0)
        throw std::domain_error("safe_window: probe time before observation instant");

    const auto& lim = scenario.limits;
    const int n = scenario.hdv_count();
    const bool has_lead = k >= 2;   // HDV k-1 ends up ahead of the AV
    const bool has_trail = k <= n;  // HDV k ends up behind the AV

    SafeWindow window;
    window.k = k;

    if (has_lead) {
        const auto& lead = scenario.hdvs[static_cast<size_t>(k - 2)];
        window.t_lower.slope = lim.phi_c / lead.desired_speed;
        window.t_lower.intercept =
            scenario.t0 +
            (scenario.control_zone_length + lim.delta - lead.state.position) /
                lead.desired_speed;
    } else {
        window.t_lower = AffineTime{0.0, scenario.t0};
    }

    if (has_trail) {
        const auto& trail = scenario.hdvs[static_cast<size_t>(k - 1)];
        window.t_upper = scenario.t0 +
                         (scenario.control_zone_length - lim.phi_h * trail.desired_speed -
                          lim.delta - trail.state.position) /
                             trail.desired_speed;
    }

    if (has_lead && has_trail) {
        const double gap = hdv_position_at(k - 1, t_probe, scenario) -
                           hdv_position_at(k, t_probe, scenario);
        const double v_d_k = scenario.hdvs[static_cast<size_t>(k - 1)].desired_speed;
        const double raw = (gap - lim.phi_h * v_d_k - 2.0 * lim.delta) / lim.phi_c;
        if (raw <= 0.0) return std::nullopt;  // no positive merging speed fits
        window.v_upper = std::min(raw, lim.v_max);
    } else {
        window.v_upper = lim.v_max;
    }

    if (window.t_upper) {
        if (*window.t_upper < scenario.t0) return std::nullopt;
        if (window.t_lower(0.0) > *window.t_upper + slack_tol(*window.t_upper))
            return std::nullopt;
    }
    return window;
}

GapCheck check_safe_gap(int k, double t_m, double v_m, const Scenario& scenario) {
    require_sequence_index(k, scenario);
    const auto& lim = scenario.limits;
    const int n = scenario.hdv_count();
    const double merge_point = scenario.control_zone_length;

    GapCheck result;
    result.lead_margin = kInf;
    result.trail_margin = kInf;
    result.combined_margin = kInf;

    if (k >= 2) {
        const double gap = hdv_position_at(k - 1, t_m, scenario) - merge_point;
        const double required = lim.phi_c * v_m + lim.delta;
        result.lead_margin = gap - required;
        result.lead_ok = result.lead_margin >= -slack_tol(required);
    } else {
        result.lead_ok = true;
    }

    double v_d_k = 0.0;
    if (k <= n) {
        v_d_k = scenario.hdvs[static_cast<size_t>(k - 1)].desired_speed;
        const double gap = merge_point - hdv_position_at(k, t_m, scenario);
        const double required = lim.phi_h * v_d_k + lim.delta;
        result.trail_margin = gap - required;
        result.trail_ok = result.trail_margin >= -slack_tol(required);
    } else {
        result.trail_ok = true;
    }

    if (k >= 2 && k <= n) {
        const double gap = hdv_position_at(k - 1, t_m, scenario) -
                           hdv_position_at(k, t_m, scenario);
        const double required = lim.phi_c * v_m + lim.phi_h * v_d_k + 2.0 * lim.delta;
        result.combined_margin = gap - required;
        result.ok = result.combined_margin >= -slack_tol(required);
    } else if (k <= n) {
        result.ok = result.trail_ok;  // only the trailing constraint binds
    } else if (k >= 2) {
        result.ok = result.lead_ok;  // only the leading constraint binds
    } else {
        result.ok = true;  // no HDVs at all
    }
    return result;
}

}  // namespace avmerge
