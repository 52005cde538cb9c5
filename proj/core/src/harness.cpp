#include "avmerge/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace avmerge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Admissible merging-velocity upper bound as a line in t; only interior
// indices are gap-bounded, and the gap drifts when neighbor speeds differ.
struct VelocityBoundLine {
    bool bounded = false;
    double at_t0 = 0.0;
    double slope = 0.0;
    double cap = 0.0;

    double at(double t, double t0) const {
        return bounded ? std::min(at_t0 + slope * (t - t0), cap) : cap;
    }
};

VelocityBoundLine velocity_bound_line(int k, const Scenario& scenario) {
    VelocityBoundLine line;
    line.cap = scenario.limits.v_max;
    if (k >= 2 && k <= scenario.hdv_count()) {
        const auto& lead = scenario.hdvs[static_cast<size_t>(k - 2)];
        const auto& trail = scenario.hdvs[static_cast<size_t>(k - 1)];
        line.bounded = true;
        line.at_t0 = (lead.state.position - trail.state.position -
                      scenario.limits.phi_h * trail.desired_speed -
                      2.0 * scenario.limits.delta) /
                     scenario.limits.phi_c;
        line.slope = (lead.desired_speed - trail.desired_speed) / scenario.limits.phi_c;
    }
    return line;
}

struct EndpointDraw {
    double x0, v0, t0, L, v_m, t_m;
};

EndpointDraw draw_endpoints(Rng& rng) {
    EndpointDraw d;
    d.t0 = rng.uniform(0.0, 50.0);
    d.x0 = rng.uniform(0.0, 200.0);
    d.L = d.x0 + rng.uniform(20.0, 800.0);
    d.v0 = rng.uniform(0.0, 35.0);
    d.v_m = rng.uniform(0.0, 35.0);
    d.t_m = d.t0 + rng.uniform(0.5, 60.0);
    return d;
}

}  // namespace

OracleResult brute_force(const Scenario& scenario, int n_t, int n_v,
                         const HdvCostFn& hdv_cost_fn) {
    validate_scenario(scenario);
    if (n_t < 2 || n_v < 2) throw std::invalid_argument("brute_force: grid must be >= 2x2");
    const HdvCostFn cost_fn =
        hdv_cost_fn ? hdv_cost_fn
                    : HdvCostFn([](int k, double v, double t, const Scenario& sc) {
                          return hdv_cost(k, v, t, sc);
                      });

    bool speeds_equal = true;
    for (const auto& hdv : scenario.hdvs)
        speeds_equal = speeds_equal && hdv.desired_speed == scenario.hdvs[0].desired_speed;

    const double t0 = scenario.t0;
    const double alpha = scenario.alpha;
    const double x0 = scenario.av.position;
    const double v0 = scenario.av.velocity;
    const double length = scenario.control_zone_length;

    OracleResult result;
    result.grid_t = n_t;
    result.grid_v = n_v;
    result.per_k.resize(static_cast<size_t>(scenario.sequence_count()));

    double best_cost = kInf;
    int best_k = 0;
    for (int k = 1; k <= scenario.sequence_count(); ++k) {
        IndexCandidate cand;
        cand.k = k;
        cand.cost = kInf;
        const auto window = safe_window(k, t0, scenario);
        if (window) {
            const double t_hi = window->search_time_limit(scenario);
            const auto vline = velocity_bound_line(k, scenario);
            double v_cap = window->v_upper;
            if (vline.bounded) v_cap = std::max(v_cap, std::max(0.0, vline.at(t_hi, t0)));

            for (int j = 0; j < n_v; ++j) {
                const double v = v_cap * j / (n_v - 1);
                const double t_lo = std::max(window->t_lower(v), t0);
                if (t_lo > t_hi) continue;

                HdvCost cached;
                bool has_cached = false;
                if (speeds_equal) {
                    cached = cost_fn(k, v, t_lo, scenario);
                    has_cached = true;  // inter-HDV gaps are time-invariant
                }
                for (int i = 0; i < n_t; ++i) {
                    const double t = t_lo + (t_hi - t_lo) * i / (n_t - 1);
                    if (t - t0 < 1e-9) continue;
                    if (vline.bounded) {
                        const double bound = vline.at(t, t0);
                        if (v > bound + 1e-12 * std::max(1.0, std::abs(bound))) continue;
                    }
                    if (!speed_within_limits(x0, v0, t0, length, v, t, scenario.limits))
                        continue;
                    const double energy = energy_closed_form(x0, v0, t0, length, v, t);
                    const HdvCost h = has_cached ? cached : cost_fn(k, v, t, scenario);
                    const double total =
                        alpha * ((t - t0) + h.undisrupted_time_sum + h.time_disruption) +
                        (1.0 - alpha) * (energy + h.energy_disruption);
                    if (total < cand.cost) {
                        cand.cost = total;
                        cand.t_m = t;
                        cand.v_m = v;
                    }
                }
            }
        }
        cand.window_nonempty = cand.cost < kInf;
        if (cand.window_nonempty && cand.cost < best_cost) {
            best_cost = cand.cost;
            best_k = k;
        }
        result.per_k[static_cast<size_t>(k - 1)] = cand;
    }
    result.argmin_k = best_k;
    return result;
}

Scenario random_scenario(uint64_t seed, const ScenarioRanges& r) {
    for (int attempt = 0; attempt < r.max_attempts; ++attempt) {
        Rng rng(seed ^ (static_cast<uint64_t>(attempt) << 32));
        Scenario sc;
        sc.t0 = rng.uniform(0.0, 50.0);
        const int n = rng.uniform_int(r.n_min, r.n_max);
        const double v_d = rng.uniform(r.v_d_min, r.v_d_max);
        const double z = rng.uniform(r.z_min, r.z_max);
        sc.control_zone_length = rng.uniform(r.length_min, r.length_max);
        sc.alpha = rng.uniform(r.alpha_min, r.alpha_max);
        sc.model.beta = rng.uniform(r.beta_min, r.beta_max);
        sc.model.u_bar = rng.uniform(r.u_bar_min, r.u_bar_max);

        auto& lim = sc.limits;
        lim.phi_c = rng.uniform(r.phi_min, r.phi_max);
        lim.phi_h = rng.uniform(r.phi_min, r.phi_max);
        lim.delta = rng.uniform(r.delta_min, r.delta_max);
        lim.v_min = 0.0;
        lim.u_max = rng.uniform(r.u_max_min, r.u_max_max);
        lim.u_min = rng.uniform(r.u_min_min, r.u_min_max);

        sc.av.position = rng.uniform(r.x0_min, r.x0_max);
        sc.av.velocity = std::min(rng.uniform(r.v0_min, r.v0_max), 0.92 * v_d);
        lim.v_max = std::max(v_d, sc.av.velocity) +
                    rng.uniform(r.v_max_margin_min, r.v_max_margin_max);

        // Anchor the platoon to the AV's cruise arrival: HDV 1 leaves the
        // merge-point safety envelope arrival_ratio cruise-times after t0,
        // so slot 1 is always admissible and the slot ladder brackets the
        // AV's natural arrival.
        const double cruise_time =
            (sc.control_zone_length - sc.av.position) / std::max(sc.av.velocity, 1.0);
        const double ratio = rng.uniform(r.arrival_ratio_min, r.arrival_ratio_max);
        const double x1 = sc.control_zone_length - (lim.phi_h * v_d + lim.delta) -
                          ratio * cruise_time * v_d;
        sc.hdvs.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            double v_i = v_d;
            if (r.speed_jitter_frac > 0.0)
                v_i = v_d * (1.0 + rng.uniform(-r.speed_jitter_frac, r.speed_jitter_frac));
            sc.hdvs[static_cast<size_t>(i)] = HdvObservation{{x1 - i * z, v_i}, v_i};
        }

        try {
            validate_scenario(sc);
        } catch (const ValidationError&) {
            continue;
        }
        if (r.speed_jitter_frac == 0.0 && n >= 2 && !uniform_platoon(sc)) continue;
        return sc;
    }
    throw std::runtime_error("random_scenario: retries exhausted");
}

ReplayAudit replay(const MergePlan& plan, const Scenario& scenario, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("replay: dt must be > 0");
    const auto& lim = scenario.limits;
    const double t_start = plan.coeffs.valid_from;
    const double t_end = plan.coeffs.valid_to;

    ReplayAudit audit;
    for (double t = t_start;; t += dt) {
        const bool last = t >= t_end - 1e-12;
        const double tt = last ? t_end : t;
        const Kinematics kin = eval(plan.coeffs, tt);
        ReplaySample sample{tt, kin.x, kin.v, kin.u, {}};
        sample.hdv_positions.reserve(scenario.hdvs.size());
        for (int i = 1; i <= scenario.hdv_count(); ++i)
            sample.hdv_positions.push_back(hdv_position_at(i, tt, scenario));
        audit.samples.push_back(std::move(sample));
        if (last) break;
    }

    const auto record = [&](const char* name, double t_at, double margin, double scale) {
        if (margin < -1e-9 * std::max(1.0, std::abs(scale)))
            audit.violations.push_back({name, t_at, margin});
    };

    // Exact extrema: control is affine, speed quadratic.
    const double u_start = eval(plan.coeffs, t_start).u;
    const double u_end = eval(plan.coeffs, t_end).u;
    const double t_u_min = u_start <= u_end ? t_start : t_end;
    const double t_u_max = u_start <= u_end ? t_end : t_start;
    record("accel_min", t_u_min, std::min(u_start, u_end) - lim.u_min, lim.u_min);
    record("accel_max", t_u_max, lim.u_max - std::max(u_start, u_end), lim.u_max);

    double v_lo = eval(plan.coeffs, t_start).v, t_v_lo = t_start;
    double v_hi = v_lo, t_v_hi = t_start;
    const auto offer_v = [&](double t_at, double v) {
        if (v < v_lo) { v_lo = v; t_v_lo = t_at; }
        if (v > v_hi) { v_hi = v; t_v_hi = t_at; }
    };
    offer_v(t_end, eval(plan.coeffs, t_end).v);
    if (plan.coeffs.a0 != 0.0) {
        const double t_vertex = -plan.coeffs.b0 / plan.coeffs.a0;
        if (t_vertex > t_start && t_vertex < t_end) offer_v(t_vertex, eval(plan.coeffs, t_vertex).v);
    }
    record("speed_min", t_v_lo, v_lo - lim.v_min, lim.v_min);
    record("speed_max", t_v_hi, lim.v_max - v_hi, lim.v_max);

    const GapCheck gap = check_safe_gap(plan.k, plan.t_m, plan.v_m, scenario);
    if (!gap.lead_ok) audit.violations.push_back({"merge_lead_gap", plan.t_m, gap.lead_margin});
    if (!gap.trail_ok) audit.violations.push_back({"merge_trail_gap", plan.t_m, gap.trail_margin});
    return audit;
}

SuiteResult energy_equivalence_suite(uint64_t seed0, int count) {
    SuiteResult res;
    res.name = "energy closed form vs quadrature";
    Rng rng(seed0);
    for (int i = 0; i < count; ++i) {
        const auto d = draw_endpoints(rng);
        const double cf = energy_closed_form(d.x0, d.v0, d.t0, d.L, d.v_m, d.t_m);
        const double q =
            energy_quadrature(solve_coefficients(d.x0, d.v0, d.t0, d.L, d.v_m, d.t_m));
        ++res.checked;
        if (std::abs(cf - q) / std::max(1.0, q) < 1e-9)
            ++res.passed;
        else
            res.failing_seeds.push_back(static_cast<uint64_t>(i));
    }
    return res;
}

SuiteResult boundary_residual_suite(uint64_t seed0, int count) {
    SuiteResult res;
    res.name = "trajectory endpoint residuals";
    Rng rng(seed0);
    for (int i = 0; i < count; ++i) {
        const auto d = draw_endpoints(rng);
        const auto coeffs = solve_coefficients(d.x0, d.v0, d.t0, d.L, d.v_m, d.t_m);
        const auto start = eval(coeffs, d.t0);
        const auto end = eval(coeffs, d.t_m);
        const double x_scale = std::max(1.0, d.L);
        const double v_scale = std::max({1.0, std::abs(d.v0), std::abs(d.v_m)});
        const bool ok = std::abs(start.x - d.x0) <= 1e-9 * x_scale &&
                        std::abs(start.v - d.v0) <= 1e-9 * v_scale &&
                        std::abs(end.x - d.L) <= 1e-9 * x_scale &&
                        std::abs(end.v - d.v_m) <= 1e-9 * v_scale;
        ++res.checked;
        if (ok)
            ++res.passed;
        else
            res.failing_seeds.push_back(static_cast<uint64_t>(i));
    }
    return res;
}

SuiteResult window_soundness_suite(uint64_t seed0, int point_count) {
    SuiteResult res;
    res.name = "window points satisfy the gap constraints";
    uint64_t seed = seed0;
    Rng rng(seed0 ^ 0xd1b54a32d192ed03ull);
    while (res.checked < point_count) {
        ScenarioRanges ranges;
        if (seed % 2 == 1) ranges.speed_jitter_frac = 0.15;  // exercise drifting gaps
        const Scenario sc = random_scenario(seed, ranges);
        for (int k = 1; k <= sc.sequence_count() && res.checked < point_count; ++k) {
            const auto window = safe_window(k, sc.t0, sc);
            if (!window) continue;
            const double t_hi = window->search_time_limit(sc);
            const auto vline = velocity_bound_line(k, sc);
            for (int s = 0; s < 4 && res.checked < point_count; ++s) {
                const double lam = s == 0 ? 0.0 : (s == 1 ? 1.0 : rng.uniform(0.0, 1.0));
                const double t_floor = std::max(window->t_lower(0.0), sc.t0);
                if (t_floor > t_hi) break;
                const double t = t_floor + lam * (t_hi - t_floor);
                double v_hi = vline.bounded ? vline.at(t, sc.t0) : sc.limits.v_max;
                if (window->t_lower.slope > 0.0)
                    v_hi = std::min(v_hi, (t - window->t_lower.intercept) /
                                              window->t_lower.slope);
                if (v_hi < 0.0) continue;
                const double v = v_hi * rng.uniform(0.0, 1.0);
                ++res.checked;
                if (check_safe_gap(k, t, v, sc).ok)
                    ++res.passed;
                else
                    res.failing_seeds.push_back(seed);
            }
        }
        ++seed;
    }
    return res;
}

SuiteResult oracle_agreement_suite(uint64_t seed0, int count, int oracle_nt, int oracle_nv,
                                   const SolveOptions& opts, const HdvCostFn& hdv_cost_fn,
                                   const ScenarioRanges& ranges) {
    SuiteResult res;
    res.name = "solver argmin vs grid oracle";
    for (int i = 0; i < count; ++i) {
        const uint64_t seed = seed0 + static_cast<uint64_t>(i);
        const Scenario sc = random_scenario(seed, ranges);
        const MergePlan plan = optimal_index(sc, opts);
        const OracleResult oracle = brute_force(sc, oracle_nt, oracle_nv, hdv_cost_fn);
        ++res.checked;
        bool ok = oracle.argmin_k == plan.k;
        if (!ok && oracle.argmin_k > 0) {
            const double oracle_cost = oracle.best().cost;
            const double plan_cost = plan.cost.total(sc.alpha);
            ok = std::abs(plan_cost - oracle_cost) <=
                 1e-4 * std::max(1.0, std::abs(oracle_cost));
        }
        if (ok)
            ++res.passed;
        else
            res.failing_seeds.push_back(seed);
    }
    return res;
}

SuiteResult time_fastpath_suite(uint64_t seed0, int needed, int oracle_nt, int oracle_nv) {
    SuiteResult res;
    res.name = "time-weighted fast-path agreement";
    ScenarioRanges ranges;
    ranges.n_min = 2;
    ranges.alpha_min = ranges.alpha_max = 1.0;

    uint64_t seed = seed0;
    for (int attempts = 0; res.checked < needed && attempts < needed * 60; ++attempts) {
        const Scenario sc = random_scenario(seed++, ranges);
        const auto platoon = uniform_platoon(sc);
        if (!platoon) continue;
        double pick_v = uniform_velocity_bound(sc);
        const double d_t =
            base_time_disruption(platoon->desired_speed, pick_v, sc.model.u_bar);
        std::optional<int> pick;
        try {
            pick = time_optimal_index(sc, pick_v, d_t);
        } catch (const AssumptionViolated&) {
            continue;
        }
        if (!pick) continue;
        if (pick_v >= platoon->desired_speed) ++res.aux;

        const OracleResult oracle = brute_force(sc, oracle_nt, oracle_nv);
        ++res.checked;
        if (*pick == oracle.argmin_k)
            ++res.passed;
        else
            res.failing_seeds.push_back(seed - 1);
    }
    std::ostringstream detail;
    detail << res.aux << " predictions took the v_m* >= v^d branch";
    res.detail = detail.str();
    return res;
}

SuiteResult energy_shortlist_suite(uint64_t seed0, int needed, int oracle_nt, int oracle_nv) {
    SuiteResult res;
    res.name = "energy-weighted shortlist vs oracle minimum";
    ScenarioRanges ranges;
    ranges.n_min = 2;
    ranges.alpha_min = ranges.alpha_max = 0.0;

    uint64_t seed = seed0;
    for (int attempts = 0; res.checked < needed && attempts < needed * 60; ++attempts) {
        const Scenario sc = random_scenario(seed++, ranges);
        const auto last = optimize_index(sc.sequence_count(), sc);
        if (!last) continue;
        std::optional<Shortlist> shortlist;
        try {
            shortlist = energy_optimal_shortlist(sc, last->t_m, last->v_m);
        } catch (const AssumptionViolated&) {
            continue;
        }
        if (!shortlist) continue;

        const OracleResult oracle = brute_force(sc, oracle_nt, oracle_nv);
        if (oracle.argmin_k == 0) continue;
        ++res.checked;
        double shortlist_min = kInf;
        for (int k : {shortlist->first, shortlist->last}) {
            const auto& cand = oracle.per_k[static_cast<size_t>(k - 1)];
            if (cand.window_nonempty) shortlist_min = std::min(shortlist_min, cand.cost);
        }
        if (shortlist_min == oracle.best().cost)
            ++res.passed;
        else
            res.failing_seeds.push_back(seed - 1);
    }
    return res;
}

SuiteResult energy_monotonicity_suite(uint64_t seed0, int count) {
    SuiteResult res;
    res.name = "energy decreasing below the stationary travel time";
    Rng rng(seed0);
    for (int i = 0; i < count; ++i) {
        const double x0 = rng.uniform(0.0, 200.0);
        const double length = x0 + rng.uniform(50.0, 800.0);
        const double v0 = rng.uniform(5.0, 33.0);
        const double v_m = rng.uniform(5.0, 33.0);
        const EnergyCurve curve = energy_curve(x0, v0, length, v_m);
        const double tau = curve.tau1();
        const double top = tau * (1.0 - 1e-6);
        const double h = tau * 1e-5;
        bool all_negative = true;
        for (int j = 1; j <= 50; ++j) {
            const double t = top * j / 51.0;
            const double fd = (curve.value(t + h) - curve.value(t - h)) / (2.0 * h);
            if (!(fd < 0.0)) all_negative = false;
        }
        ++res.checked;
        if (all_negative)
            ++res.passed;
        else
            res.failing_seeds.push_back(static_cast<uint64_t>(i));
    }
    return res;
}

SuiteResult alpha_regime_suite(uint64_t seed0, int count, const SolveOptions& opts) {
    SuiteResult res;
    res.name = "argmin stability across certified alpha regimes";
    // The threshold certificates assume slot energies on an actuator scale
    // and a clearly attenuated disruption chain; sample that regime.
    ScenarioRanges ranges;
    ranges.n_min = 2;
    ranges.alpha_min = ranges.alpha_max = 0.5;
    ranges.arrival_ratio_min = 0.75;
    ranges.arrival_ratio_max = 0.95;
    ranges.z_min = 45.0;
    ranges.beta_min = 0.1;

    for (int i = 0; i < count; ++i) {
        const uint64_t seed = seed0 + static_cast<uint64_t>(i);
        Scenario sc = random_scenario(seed, ranges);
        const double v_star = shared_merge_velocity(sc, opts);
        const double a_lower = alpha_lower_threshold(sc, v_star);
        const double a_upper = alpha_upper_threshold(sc, v_star);

        bool ok = true;
        int ref = -1;
        for (int j = 1; j <= 10 && ok; ++j) {
            Scenario probe = sc;
            probe.alpha = a_lower + (1.0 - a_lower) * j / 10.0;
            const int argmin = scan_indices(probe, opts).argmin_k;
            if (ref < 0) ref = argmin;
            ok = argmin == ref;
        }
        ref = -1;
        for (int j = 0; j <= 9 && ok; ++j) {
            Scenario probe = sc;
            probe.alpha = a_upper * j / 9.0;
            const int argmin = scan_indices(probe, opts).argmin_k;
            if (ref < 0) ref = argmin;
            ok = argmin == ref;
        }
        ++res.checked;
        if (ok)
            ++res.passed;
        else
            res.failing_seeds.push_back(seed);
    }
    return res;
}

}  // namespace avmerge
