#include "avmerge/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace avmerge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel_tol(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

// Tracks the best admissible point seen across grid and refinement.
struct BestPoint {
    double cost = kInf;
    double t_m = 0.0;
    double v_m = 0.0;
    CostBreakdown breakdown;

    void offer(double cost_value, double t, double v, const CostBreakdown& cb) {
        if (cost_value < cost) {
            cost = cost_value;
            t_m = t;
            v_m = v;
            breakdown = cb;
        }
    }
};

// Golden-section scan; relies on the evaluator for best-point bookkeeping.
template <typename F>
void golden_scan(double lo, double hi, double tol, F&& f) {
    if (!(hi > lo)) {
        if (hi == lo) f(lo);
        return;
    }
    constexpr double phi = 0.6180339887498949;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
}

struct OptimizedIndex {
    IndexOptimum optimum;
    TrajectoryCoefficients coeffs;
    FeasibilityReport report;
};

// Shared search core. With require_feasible the trajectory audit becomes part
// of the admissibility test (used by the last-resort re-solve).
std::optional<OptimizedIndex> optimize_index_impl(int k, const Scenario& scenario,
                                                  const SolveOptions& opts,
                                                  bool require_feasible) {
    const auto window = safe_window(k, scenario.t0, scenario);
    if (!window) return std::nullopt;

    const double t_hi = window->search_time_limit(scenario);
    double v_cap = window->v_upper;
    if (k >= 2 && k <= scenario.hdv_count()) {
        // With unequal neighbor speeds the admissible velocity bound drifts
        // linearly in time; cover its largest value over the search horizon.
        if (const auto late = safe_window(k, t_hi, scenario))
            v_cap = std::max(v_cap, late->v_upper);
    }

    const double alpha = scenario.alpha;
    BestPoint best;
    const auto consider = [&](double t, double v) -> double {
        try {
            if (!speed_within_limits(scenario.av.position, scenario.av.velocity,
                                     scenario.t0, scenario.control_zone_length, v, t,
                                     scenario.limits))
                return kInf;
            const CostBreakdown cb = cost_at(k, t, v, scenario);
            if (require_feasible) {
                const auto coeffs =
                    solve_coefficients(scenario.av.position, scenario.av.velocity,
                                       scenario.t0, scenario.control_zone_length, v, t);
                if (!feasibility(coeffs, scenario.limits).ok()) return kInf;
            }
            const double total = cb.total(alpha);
            best.offer(total, t, v, cb);
            return total;
        } catch (const std::exception&) {
            return kInf;
        }
    };

    const int nv = std::max(opts.grid_v, 2);
    const int nt = std::max(opts.grid_t, 2);
    double cell_t = 0.0;
    for (int j = 0; j < nv; ++j) {
        const double v = v_cap * j / (nv - 1);
        const double t_lo = std::max(window->t_lower(v), scenario.t0);
        if (t_lo > t_hi) continue;
        cell_t = std::max(cell_t, (t_hi - t_lo) / (nt - 1));
        const auto t_at = [&](int i) { return t_lo + (t_hi - t_lo) * i / (nt - 1); };
        int first = -1;
        int last = -1;
        for (int i = 0; i < nt; ++i) {
            if (consider(t_at(i), v) < kInf) {
                if (first < 0) first = i;
                last = i;
            }
        }
        // The admissible times of a row form an interval whose edges rarely
        // fall on grid nodes; sharpen both by bisection so edge-riding
        // optima are seeded even when the sliver is thinner than a cell.
        if (first > 0) {
            double bad = t_at(first - 1);
            double good = t_at(first);
            for (int step = 0; step < 30; ++step) {
                const double mid = 0.5 * (bad + good);
                (consider(mid, v) < kInf ? good : bad) = mid;
            }
        }
        if (last >= 0 && last + 1 < nt) {
            double good = t_at(last);
            double bad = t_at(last + 1);
            for (int step = 0; step < 30; ++step) {
                const double mid = 0.5 * (bad + good);
                (consider(mid, v) < kInf ? good : bad) = mid;
            }
        }
    }
    if (!(best.cost < kInf)) return std::nullopt;

    // Coordinate descent with a shrinking bracket around the grid winner.
    const double tol = std::max(opts.refine_tol, 1e-12);
    double bracket_t = std::max(cell_t, tol);
    double bracket_v = std::max(v_cap / (nv - 1), tol);
    for (int iter = 0; iter < 80 && (bracket_t > tol || bracket_v > tol); ++iter) {
        const double t_lo = std::max(window->t_lower(best.v_m), scenario.t0);
        golden_scan(std::max(t_lo, best.t_m - bracket_t),
                    std::min(t_hi, best.t_m + bracket_t), tol,
                    [&](double t) { return consider(t, best.v_m); });
        const double t_pin = best.t_m;
        golden_scan(std::max(0.0, best.v_m - bracket_v),
                    std::min(v_cap, best.v_m + bracket_v), tol, [&](double v) {
                        const double lo = std::max(window->t_lower(v), scenario.t0);
                        return consider(std::clamp(t_pin, lo, t_hi), v);
                    });
        bracket_t = std::max(0.5 * bracket_t, tol * 0.5);
        bracket_v = std::max(0.5 * bracket_v, tol * 0.5);
    }

    // Compass polish: axis moves stall in diagonal valleys, in particular
    // along the curved admissibility edge where time-heavy optima sit.
    double step_t = std::max(cell_t, tol);
    double step_v = std::max(v_cap / (nv - 1), tol);
    for (int evals = 0; (step_t > tol || step_v > tol) && evals < 4000;) {
        const double before = best.cost;
        const double t_c = best.t_m;
        const double v_c = best.v_m;
        for (int dv = -1; dv <= 1; ++dv) {
            for (int dt = -1; dt <= 1; ++dt) {
                if (dt == 0 && dv == 0) continue;
                const double v = std::clamp(v_c + dv * step_v, 0.0, v_cap);
                const double lo = std::max(window->t_lower(v), scenario.t0);
                consider(std::clamp(t_c + dt * step_t, lo, t_hi), v);
                ++evals;
            }
        }
        if (!(best.cost < before)) {
            step_t = std::max(0.5 * step_t, tol * 0.5);
            step_v = std::max(0.5 * step_v, tol * 0.5);
        }
    }

    OptimizedIndex result;
    result.optimum = IndexOptimum{best.t_m, best.v_m, best.breakdown};
    result.coeffs = solve_coefficients(scenario.av.position, scenario.av.velocity,
                                       scenario.t0, scenario.control_zone_length,
                                       best.v_m, best.t_m);
    result.report = feasibility(result.coeffs, scenario.limits);
    return result;
}

UniformPlatoon require_platoon(const Scenario& scenario) {
    const auto platoon = uniform_platoon(scenario);
    if (!platoon)
        throw AssumptionViolated("uniform platoon of at least two HDVs required");
    return *platoon;
}

MergePlan make_plan(int k, const OptimizedIndex& solved) {
    MergePlan plan;
    plan.k = k;
    plan.t_m = solved.optimum.t_m;
    plan.v_m = solved.optimum.v_m;
    plan.coeffs = solved.coeffs;
    plan.cost = solved.optimum.cost;
    plan.feasibility = solved.report;
    return plan;
}

}  // namespace

CostBreakdown cost_at(int k, double t_m, double v_m, const Scenario& scenario) {
    require_sequence_index(k, scenario);
    if (t_m < scenario.t0) throw UnsafePoint();

    const auto window = safe_window(k, t_m, scenario);
    if (!window) throw UnsafePoint();
    if (v_m < -rel_tol(window->v_upper) || v_m > window->v_upper + rel_tol(window->v_upper))
        throw UnsafePoint();
    const double t_lo = window->t_lower(v_m);
    if (t_m < t_lo - rel_tol(t_lo)) throw UnsafePoint();
    if (window->t_upper && t_m > *window->t_upper + rel_tol(*window->t_upper))
        throw UnsafePoint();

    CostBreakdown cb;
    cb.av_time = t_m - scenario.t0;
    cb.av_energy = energy_closed_form(scenario.av.position, scenario.av.velocity,
                                      scenario.t0, scenario.control_zone_length, v_m, t_m);
    cb.hdv = hdv_cost(k, v_m, t_m, scenario);
    return cb;
}

std::optional<IndexOptimum> optimize_index(int k, const Scenario& scenario,
                                           const SolveOptions& opts) {
    require_sequence_index(k, scenario);
    auto solved = optimize_index_impl(k, scenario, opts, false);
    if (!solved) return std::nullopt;
    return solved->optimum;
}

IndexScan scan_indices(const Scenario& scenario, const SolveOptions& opts) {
    validate_scenario(scenario);
    IndexScan scan;
    scan.per_k.resize(static_cast<size_t>(scenario.sequence_count()));
    double best = kInf;
    for (int k = 1; k <= scenario.sequence_count(); ++k) {
        auto optimum = optimize_index(k, scenario, opts);
        if (optimum) {
            const double total = optimum->cost.total(scenario.alpha);
            if (total < best) {
                best = total;
                scan.argmin_k = k;
            }
        }
        scan.per_k[static_cast<size_t>(k - 1)] = std::move(optimum);
    }
    return scan;
}

MergePlan optimal_index(const Scenario& scenario, const SolveOptions& opts) {
    validate_scenario(scenario);
    const int n_seq = scenario.sequence_count();

    // Fast-path-only mode narrows the candidate set when a prediction
    // applies; anything inconclusive falls through to the full scan.
    std::vector<char> considered(static_cast<size_t>(n_seq + 1), 1);
    if (opts.fast_path == FastPathMode::Only && scenario.hdv_count() >= 2) {
        try {
            const double v_star = shared_merge_velocity(scenario, opts);
            const auto platoon = require_platoon(scenario);
            const double d_t = base_time_disruption(platoon.desired_speed, v_star,
                                                    scenario.model.u_bar);
            if (scenario.alpha > alpha_lower_threshold(scenario, v_star)) {
                if (const auto pick = time_optimal_index(scenario, v_star, d_t)) {
                    std::fill(considered.begin(), considered.end(), 0);
                    considered[static_cast<size_t>(*pick)] = 1;
                    considered[static_cast<size_t>(n_seq)] = 1;  // keep the safe haven
                }
            } else if (scenario.alpha <= alpha_upper_threshold(scenario, v_star)) {
                const auto last = optimize_index(n_seq, scenario, opts);
                if (last) {
                    if (energy_optimal_shortlist(scenario, last->t_m, v_star)) {
                        std::fill(considered.begin(), considered.end(), 0);
                        considered[1] = 1;
                        considered[static_cast<size_t>(n_seq)] = 1;
                    }
                }
            }
        } catch (const AssumptionViolated&) {
            // heterogeneous traffic: no prediction, scan everything
        }
    }

    struct Ranked {
        int k;
        double total;
        OptimizedIndex solved;
    };
    std::vector<Ranked> ranked;
    std::vector<SkippedIndex> skipped;
    for (int k = 1; k <= n_seq; ++k) {
        if (!considered[static_cast<size_t>(k)]) continue;
        auto solved = optimize_index_impl(k, scenario, opts, false);
        if (!solved) {
            skipped.push_back({k, SkipReason::EmptyWindow});
            continue;
        }
        ranked.push_back({k, solved->optimum.cost.total(scenario.alpha), std::move(*solved)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        return a.total < b.total || (a.total == b.total && a.k < b.k);
    });

    const int cost_argmin = ranked.empty() ? 0 : ranked.front().k;
    for (const auto& entry : ranked) {
        if (!entry.solved.report.ok()) {
            skipped.push_back({entry.k, SkipReason::ActuatorInfeasible});
            continue;
        }
        MergePlan plan = make_plan(entry.k, entry.solved);
        plan.fallback_applied = entry.k != cost_argmin;
        plan.skipped = std::move(skipped);
        return plan;
    }

    // Every ranked optimum failed the audit. Waiting behind the whole queue
    // must stay reachable: re-solve the last index with the audit folded
    // into the search.
    SolveOptions dense = opts;
    dense.grid_t = std::max(opts.grid_t * 4, 256);
    dense.grid_v = std::max(opts.grid_v * 4, 256);
    if (auto rescue = optimize_index_impl(n_seq, scenario, dense, true)) {
        MergePlan plan = make_plan(n_seq, *rescue);
        plan.fallback_applied = true;
        plan.skipped = std::move(skipped);
        return plan;
    }
    throw NoFeasiblePlan("no admissible merge for any sequence index");
}

double shared_merge_velocity(const Scenario& scenario, const SolveOptions& opts) {
    SolveOptions plain = opts;
    plain.fast_path = FastPathMode::Off;
    const auto last = optimize_index(scenario.sequence_count(), scenario, plain);
    if (!last) throw NoFeasiblePlan("last-index window is empty");
    return last->v_m;
}

double uniform_velocity_bound(const Scenario& scenario) {
    const auto platoon = require_platoon(scenario);
    const auto& lim = scenario.limits;
    const double raw =
        (platoon.spacing - lim.phi_h * platoon.desired_speed - 2.0 * lim.delta) / lim.phi_c;
    return std::clamp(raw, 0.0, lim.v_max);
}

double geometric_sum(double gamma, int m) {
    if (m <= 0) return 0.0;
    if (std::abs(1.0 - gamma) < 1e-12) return static_cast<double>(m);
    return (1.0 - std::pow(gamma, m)) / (1.0 - gamma);
}

double alpha_lower_threshold_formula(double e_max, double z, double v_d,
                                     double gamma, int n, double d_t) {
    return e_max / (e_max + z / v_d + std::pow(gamma, n - 1) * d_t);
}

double alpha_upper_threshold_formula(double e_min, double z, double v_d,
                                     double gamma, int n, double d_t) {
    return e_min / (e_min + n * z / v_d + geometric_sum(gamma, n) * d_t);
}

double alpha_lower_threshold(const Scenario& scenario, double v_m_star) {
    const auto platoon = require_platoon(scenario);
    const auto& lim = scenario.limits;
    const int n = scenario.hdv_count();
    const double e_max =
        0.5 * ((lim.v_max - scenario.av.velocity) * lim.u_max +
               n * (platoon.desired_speed - lim.v_min) * scenario.model.u_bar);
    const double gamma = discount_factor(scenario.model.beta, platoon.spacing);
    const double d_t =
        base_time_disruption(platoon.desired_speed, v_m_star, scenario.model.u_bar);
    return alpha_lower_threshold_formula(e_max, platoon.spacing, platoon.desired_speed,
                                         gamma, n, d_t);
}

double alpha_upper_threshold(const Scenario& scenario, double v_m_star) {
    const auto platoon = require_platoon(scenario);
    const int n = scenario.hdv_count();
    const double gamma = discount_factor(scenario.model.beta, platoon.spacing);
    const double d_t =
        base_time_disruption(platoon.desired_speed, v_m_star, scenario.model.u_bar);
    const double d_e =
        base_energy_disruption(platoon.desired_speed, v_m_star, scenario.model.u_bar);
    const double e_min = std::pow(gamma, n - 1) * d_e;
    return alpha_upper_threshold_formula(e_min, platoon.spacing, platoon.desired_speed,
                                         gamma, n, d_t);
}

double alpha_lower_threshold(const Scenario& scenario) {
    return alpha_lower_threshold(scenario, shared_merge_velocity(scenario));
}

double alpha_upper_threshold(const Scenario& scenario) {
    return alpha_upper_threshold(scenario, shared_merge_velocity(scenario));
}

std::optional<int> time_optimal_index(const Scenario& scenario, double v_m_star,
                                      double base_dt) {
    const int n = scenario.hdv_count();
    if (n < 1) throw AssumptionViolated("at least one HDV required");
    std::optional<UniformPlatoon> platoon;
    if (n >= 2) {
        platoon = uniform_platoon(scenario);
        if (!platoon) throw AssumptionViolated("uniform platoon required");
    }
    const double v_d = scenario.hdvs[0].desired_speed;

    // The prediction presumes slot 1 is genuinely available: window open,
    // speed limit above the platoon speed, and the fastest in-limit ramp
    // (peak speed v_max at the merge) arriving inside the window. Otherwise
    // defer to the full scan.
    if (scenario.limits.v_max < v_d) return std::nullopt;
    const auto slot1 = safe_window(1, scenario.t0, scenario);
    if (!slot1 || !slot1->t_upper) return std::nullopt;
    const double ramp_time = 3.0 * (scenario.control_zone_length - scenario.av.position) /
                             (scenario.av.velocity + 2.0 * scenario.limits.v_max);
    if (*slot1->t_upper - scenario.t0 < 1.01 * ramp_time + 1e-6) return std::nullopt;

    if (v_m_star >= v_d) return 1;
    if (!platoon) return std::nullopt;

    const double z = platoon->spacing;
    const double gamma = discount_factor(scenario.model.beta, z);
    const double scale = v_d * base_dt;
    for (int q = 1; q <= n + 1; ++q) {
        // Spacing must be large enough that later slots cost more time than
        // they save in disruption, and small enough for the converse against
        // earlier slots. One side is vacuous at each end of the range.
        bool ok = true;
        if (q <= n) {
            const int m = n - q + 1;
            ok = z >= geometric_sum(gamma, m) / m * scale;
        }
        if (ok && q >= 2) {
            ok = z <= std::pow(gamma, n - q + 1) * geometric_sum(gamma, q - 1) / (q - 1) *
                          scale;
        }
        if (ok) {
            // Answers past slot 1 would assume slot 1 is spacing-bound like
            // the interior ones; the literal windows give it more freedom,
            // so only the first-slot conclusion transfers.
            return q == 1 ? std::optional<int>(1) : std::nullopt;
        }
    }
    return std::nullopt;
}

std::optional<Shortlist> energy_optimal_shortlist(const Scenario& scenario,
                                                  double t_m_last, double v_m_star) {
    const int n = scenario.hdv_count();
    if (n < 1) throw AssumptionViolated("at least one HDV required");
    if (n >= 2 && !uniform_platoon(scenario))
        throw AssumptionViolated("uniform platoon required");

    const double travel = t_m_last - scenario.t0;
    const double tau = energy_curve(scenario.av.position, scenario.av.velocity,
                                    scenario.control_zone_length, v_m_star)
                           .tau1();
    if (travel <= tau * (1.0 + 1e-9) + 1e-9) return Shortlist{1, n + 1};
    return std::nullopt;
}

}  // namespace avmerge
