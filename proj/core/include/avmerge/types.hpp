#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace avmerge {

// All quantities SI. Times are absolute seconds; positions are meters along
// the lane from a common origin, with the merge point at control_zone_length.

struct VehicleState {
    double position = 0.0;  // [m], <= control_zone_length at observation time
    double velocity = 0.0;  // [m/s], >= 0
};

// One human-driven vehicle as observed by the AV. Fleet order is by position
// descending: index 1 is the HDV closest to the merge point.
struct HdvObservation {
    VehicleState state;
    double desired_speed = 0.0;  // [m/s], equals state.velocity at observation
};

struct ConstraintLimits {
    double v_min = 0.0;   // [m/s]
    double v_max = 0.0;   // [m/s], > v_min
    double u_min = 0.0;   // [m/s^2], < 0
    double u_max = 0.0;   // [m/s^2], > 0
    double phi_c = 0.0;   // [s] AV reaction time, > 0
    double phi_h = 0.0;   // [s] HDV reaction time, > 0
    double delta = 0.0;   // [m] standstill gap, > 0
};

// Surrogate model of how a disturbed HDV reacts.
struct BehaviorModel {
    double u_bar = 0.0;  // [m/s^2] constant accel/decel magnitude, > 0
    double beta = 0.0;   // [1/m] disruption decay rate, in (0,1)
};

struct Scenario {
    double t0 = 0.0;                    // [s] observation instant
    VehicleState av;                    // AV state at t0
    std::vector<HdvObservation> hdvs;   // sorted by position descending
    double control_zone_length = 0.0;   // [m] merge-point coordinate
    double alpha = 0.0;                 // time-vs-energy weight in [0,1]
    ConstraintLimits limits;
    BehaviorModel model;

    int hdv_count() const { return static_cast<int>(hdvs.size()); }
    // Sequence indices run 1..N+1: merging as k-th vehicle puts HDV k-1
    // ahead of the AV (absent for k=1) and HDV k behind (absent for k=N+1).
    int sequence_count() const { return hdv_count() + 1; }
};

enum class ScenarioError {
    UnorderedHdvs,
    SpeedMismatch,
    NonPositiveParameter,
    AlphaOutOfRange,
    NegativeVelocity,
    PositionBeyondMergePoint,
};

const char* to_string(ScenarioError code);

class ValidationError : public std::runtime_error {
  public:
    ValidationError(ScenarioError code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ScenarioError code() const { return code_; }

  private:
    ScenarioError code_;
};

// Checks every structural invariant and returns the scenario unchanged.
// Throws ValidationError; validating twice is a no-op.
const Scenario& validate_scenario(const Scenario& scenario);

// Equal desired speeds and equal spacing, detected within a relative
// tolerance. Enables the fast paths; requires at least two HDVs.
struct UniformPlatoon {
    double spacing = 0.0;        // [m] common inter-HDV gap
    double desired_speed = 0.0;  // [m/s]
};

std::optional<UniformPlatoon> uniform_platoon(const Scenario& scenario,
                                              double rel_tol = 1e-9);

// 1-based bounds checks shared by the modules below.
void require_hdv_index(int hdv_index, const Scenario& scenario);
void require_sequence_index(int k, const Scenario& scenario);

}  // namespace avmerge
