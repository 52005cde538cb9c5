#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "avmerge/disruption.hpp"
#include "avmerge/safe_sets.hpp"
#include "avmerge/trajectory.hpp"

namespace avmerge {

// Cost of one candidate merge, split the way the objective weighs it:
// total(alpha) = alpha * (AV time + fleet time) + (1-alpha) * (AV energy +
// fleet energy disruption).
struct CostBreakdown {
    double av_time = 0.0;    // [s] t_m - t0
    double av_energy = 0.0;  // control effort of the AV trajectory
    HdvCost hdv;

    double total(double alpha) const {
        return alpha * (av_time + hdv.undisrupted_time_sum + hdv.time_disruption) +
               (1.0 - alpha) * (av_energy + hdv.energy_disruption);
    }
};

enum class SkipReason { EmptyWindow, ActuatorInfeasible };

struct SkippedIndex {
    int k = 0;
    SkipReason reason = SkipReason::EmptyWindow;
};

struct MergePlan {
    int k = 0;
    double t_m = 0.0;  // [s]
    double v_m = 0.0;  // [m/s]
    TrajectoryCoefficients coeffs;
    CostBreakdown cost;
    FeasibilityReport feasibility;
    bool fallback_applied = false;
    std::vector<SkippedIndex> skipped;
};

enum class FastPathMode { Off, Advisory, Only };

struct SolveOptions {
    int grid_t = 64;
    int grid_v = 64;
    double refine_tol = 1e-6;  // [s] and [m/s]
    FastPathMode fast_path = FastPathMode::Off;
};

class UnsafePoint : public std::domain_error {
  public:
    UnsafePoint() : std::domain_error("candidate (t_m, v_m) outside the safe window") {}
};

class NoFeasiblePlan : public std::runtime_error {
  public:
    explicit NoFeasiblePlan(const std::string& what) : std::runtime_error(what) {}
};

class AssumptionViolated : public std::domain_error {
  public:
    explicit AssumptionViolated(const std::string& what) : std::domain_error(what) {}
};

// Full cost of merging as the k-th vehicle at (t_m, v_m). Throws UnsafePoint
// when the candidate violates index k's window.
CostBreakdown cost_at(int k, double t_m, double v_m, const Scenario& scenario);

struct IndexOptimum {
    double t_m = 0.0;
    double v_m = 0.0;
    CostBreakdown cost;
};

// Best (t_m, v_m) for one index: coarse grid over the window followed by
// shrinking-bracket coordinate descent. The refined point never costs more
// than the best grid sample. nullopt when the window is empty.
std::optional<IndexOptimum> optimize_index(int k, const Scenario& scenario,
                                           const SolveOptions& opts = {});

// Per-index optima for k = 1..N+1 (entry k-1), plus the cost argmin with
// ties broken toward the smaller index.
struct IndexScan {
    std::vector<std::optional<IndexOptimum>> per_k;
    int argmin_k = 0;
};

IndexScan scan_indices(const Scenario& scenario, const SolveOptions& opts = {});

// The complete decision: scan, rank by cost, and return the cheapest index
// whose trajectory honors the actuator and speed limits, recording skipped
// indices. Falling back past the argmin sets fallback_applied. Waiting
// behind everyone is kept reachable by a feasibility-constrained re-solve
// of the last index when every ranked optimum fails the audit.
MergePlan optimal_index(const Scenario& scenario, const SolveOptions& opts = {});

// Merging velocity shared across indices under a uniform platoon, taken
// from the last-index solve.
double shared_merge_velocity(const Scenario& scenario, const SolveOptions& opts = {});

// Largest merging velocity admitted by the interior windows of a uniform
// platoon, clamped to [0, v_max]. Requires at least two HDVs.
double uniform_velocity_bound(const Scenario& scenario);

// Weight thresholds bounding the regimes where the time-optimal (above
// lower) and energy-optimal (below upper) index choices are unchanged.
// Require a uniform platoon of at least two HDVs. The single-argument forms
// take v_m* from the last-index solve.
double alpha_lower_threshold(const Scenario& scenario, double v_m_star);
double alpha_upper_threshold(const Scenario& scenario, double v_m_star);
double alpha_lower_threshold(const Scenario& scenario);
double alpha_upper_threshold(const Scenario& scenario);

// Raw threshold algebra, exposed for direct checks.
double alpha_lower_threshold_formula(double e_max, double z, double v_d,
                                     double gamma, int n, double d_t);
double alpha_upper_threshold_formula(double e_min, double z, double v_d,
                                     double gamma, int n, double d_t);

// 1 + gamma + ... + gamma^(m-1), stable as gamma -> 1.
double geometric_sum(double gamma, int m);

// Fast path for time-dominated weights: predicts the optimal index without
// scanning, or returns nullopt when no prediction is consistent with the
// window model (the caller then runs the full scan). base_dt is the base
// time disruption at v_m_star.
std::optional<int> time_optimal_index(const Scenario& scenario, double v_m_star,
                                      double base_dt);

// Fast path for energy-dominated weights: when the last index's travel time
// stays below the stationary point of the energy curve, only the first and
// last indices can be optimal.
struct Shortlist {
    int first = 0;
    int last = 0;
};

std::optional<Shortlist> energy_optimal_shortlist(const Scenario& scenario,
                                                  double t_m_last, double v_m_star);

}  // namespace avmerge
