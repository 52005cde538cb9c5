#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "avmerge/policy.hpp"

namespace avmerge {

// Deterministic, platform-independent generator (splitmix64 core).
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

  private:
    uint64_t state_;
};

// Exhaustive per-index grid search over the safe windows. Shares only the
// primitive formulas with the solver; the search loop is its own.
struct IndexCandidate {
    int k = 0;
    bool window_nonempty = false;
    double t_m = 0.0;
    double v_m = 0.0;
    double cost = 0.0;  // total at the scenario's alpha
};

struct OracleResult {
    std::vector<IndexCandidate> per_k;  // entry k-1
    int argmin_k = 0;                   // ties to the smaller index; 0 if all empty
    int grid_t = 0;
    int grid_v = 0;

    const IndexCandidate& best() const { return per_k[static_cast<size_t>(argmin_k - 1)]; }
};

// Overridable HDV-cost evaluation, used to inject faults in tests.
using HdvCostFn = std::function<HdvCost(int, double, double, const Scenario&)>;

OracleResult brute_force(const Scenario& scenario, int n_t, int n_v,
                         const HdvCostFn& hdv_cost_fn = {});

// Random scenario construction: a uniform platoon (exact equal speeds and
// spacing unless speed_jitter_frac > 0). The platoon is anchored in time:
// the first HDV reaches the merge point at arrival_ratio times the AV's
// cruise travel time, so the slots interleave the AV's natural arrival
// instead of being arbitrarily far ahead or behind.
struct ScenarioRanges {
    int n_min = 1;
    int n_max = 6;
    double z_min = 40.0, z_max = 110.0;        // [m] platoon spacing
    double v_d_min = 20.0, v_d_max = 32.0;     // [m/s]
    double v0_min = 10.0, v0_max = 28.0;       // [m/s], capped at 0.92 v_d
    double x0_min = 0.0, x0_max = 60.0;        // [m]
    double length_min = 300.0, length_max = 600.0;
    double beta_min = 0.05, beta_max = 0.4;
    double u_bar_min = 1.5, u_bar_max = 5.0;
    double phi_min = 0.4, phi_max = 1.2;       // [s] both reaction times
    double delta_min = 3.0, delta_max = 7.0;   // [m]
    double alpha_min = 0.0, alpha_max = 0.85;
    double arrival_ratio_min = 0.55, arrival_ratio_max = 1.35;
    double v_max_margin_min = 4.0, v_max_margin_max = 9.0;  // above max(v_d, v0)
    double u_max_min = 3.0, u_max_max = 6.0;
    double u_min_min = -7.0, u_min_max = -4.0;
    double speed_jitter_frac = 0.0;  // >0 breaks the uniform-platoon property
    int max_attempts = 64;
};

Scenario random_scenario(uint64_t seed, const ScenarioRanges& ranges = {});

// Time-stepped audit of a plan: AV on its trajectory, HDVs cruising.
// Speed/acceleration checks use exact polynomial extrema, so dt only
// affects the sample log; one worst-margin entry per violated constraint.
struct ReplaySample {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;
    double u = 0.0;
    std::vector<double> hdv_positions;
};

struct ReplayViolation {
    std::string constraint;
    double t = 0.0;
    double margin = 0.0;  // negative = violated
};

struct ReplayAudit {
    std::vector<ReplaySample> samples;
    std::vector<ReplayViolation> violations;
};

ReplayAudit replay(const MergePlan& plan, const Scenario& scenario, double dt = 0.01);

// Randomized verification suites; each returns per-case pass counts and the
// seeds of failing cases for reproduction.
struct SuiteResult {
    std::string name;
    int checked = 0;
    int passed = 0;
    int aux = 0;  // suite-specific counter (see each suite's doc)
    std::vector<uint64_t> failing_seeds;
    std::string detail;

    bool ok() const { return checked > 0 && passed == checked; }
};

// Closed-form energy against the quadrature oracle on random endpoint data.
SuiteResult energy_equivalence_suite(uint64_t seed0, int count);

// Endpoint residuals of solved trajectories.
SuiteResult boundary_residual_suite(uint64_t seed0, int count);

// Points sampled inside computed windows must pass the gap audit.
SuiteResult window_soundness_suite(uint64_t seed0, int point_count);

// Solver argmin against the grid oracle on random scenarios.
SuiteResult oracle_agreement_suite(uint64_t seed0, int count, int oracle_nt, int oracle_nv,
                                   const SolveOptions& opts = {},
                                   const HdvCostFn& hdv_cost_fn = {},
                                   const ScenarioRanges& ranges = {});

// Time-weighted fast path: every returned prediction must equal the oracle
// argmin. Runs until `needed` predictions were produced; detail reports how
// many took the v_m* >= v_d branch.
SuiteResult time_fastpath_suite(uint64_t seed0, int needed, int oracle_nt, int oracle_nv);

// Energy-weighted shortlist: when it applies, min over {first, last} must
// equal the oracle's global minimum.
SuiteResult energy_shortlist_suite(uint64_t seed0, int needed, int oracle_nt, int oracle_nv);

// Energy curve is decreasing below its stationary point (finite differences).
SuiteResult energy_monotonicity_suite(uint64_t seed0, int count);

// Argmin is stable across the certified alpha regimes.
SuiteResult alpha_regime_suite(uint64_t seed0, int count, const SolveOptions& opts = {});

}  // namespace avmerge
