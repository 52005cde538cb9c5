#pragma once

#include <iosfwd>
#include <string>

#include "avmerge/policy.hpp"

namespace avmerge {

// Solver settings carried alongside a scenario file's `solver:` section.
struct SolverConfig {
    SolveOptions options;
    int oracle_grid_t = 512;
    int oracle_grid_v = 512;
    double sample_dt = 0.1;  // [s] trajectory CSV step
};

struct ScenarioFile {
    Scenario scenario;
    SolverConfig solver;
};

class ScenarioParseError : public std::runtime_error {
  public:
    explicit ScenarioParseError(const std::string& what) : std::runtime_error(what) {}
};

ScenarioFile load_scenario_file(const std::string& path);
ScenarioFile parse_scenario_text(const std::string& text);

// Lossless serialization: parse(scenario_to_text(s)) reproduces s exactly.
std::string scenario_to_text(const Scenario& scenario);

// printf %.{digits}g; all human-facing output uses 9 significant digits.
std::string format_g(double value, int digits = 9);

// Header `t,x,v,u`, one row per dt step, final row exactly at the horizon end.
void write_trajectory_csv(std::ostream& out, const TrajectoryCoefficients& coeffs,
                          double dt);

// Structured plan report: chosen index, cost split, coefficients, the skip
// history, and (when a scan is supplied) one row per candidate index.
std::string plan_to_text(const MergePlan& plan, const Scenario& scenario,
                         const IndexScan* scan = nullptr);

const char* to_string(FastPathMode mode);
FastPathMode fast_path_from_string(const std::string& text);

}  // namespace avmerge
