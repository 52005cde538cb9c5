#include "avmerge/types.hpp"

#include <cmath>
#include <sstream>

namespace avmerge {

namespace {

bool close_rel(double a, double b, double rel_tol) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= rel_tol * scale;
}

[[noreturn]] void fail(ScenarioError code, const std::string& detail) {
    std::ostringstream msg;
    msg << to_string(code) << ": " << detail;
    throw ValidationError(code, msg.str());
}

}  // namespace

const char* to_string(ScenarioError code) {
    switch (code) {
        case ScenarioError::UnorderedHdvs: return "UnorderedHdvs";
        case ScenarioError::SpeedMismatch: return "SpeedMismatch";
        case ScenarioError::NonPositiveParameter: return "NonPositiveParameter";
        case ScenarioError::AlphaOutOfRange: return "AlphaOutOfRange";
        case ScenarioError::NegativeVelocity: return "NegativeVelocity";
        case ScenarioError::PositionBeyondMergePoint: return "PositionBeyondMergePoint";
    }
    return "UnknownScenarioError";
}

const Scenario& validate_scenario(const Scenario& scenario) {
    const auto& lim = scenario.limits;
    if (scenario.control_zone_length <= 0.0)
        fail(ScenarioError::NonPositiveParameter, "control_zone_length must be > 0");
    if (!(lim.v_min < lim.v_max))
        fail(ScenarioError::NonPositiveParameter, "require v_min < v_max");
    if (!(lim.u_min < 0.0) || !(lim.u_max > 0.0))
        fail(ScenarioError::NonPositiveParameter, "require u_min < 0 < u_max");
    if (lim.phi_c <= 0.0 || lim.phi_h <= 0.0 || lim.delta <= 0.0)
        fail(ScenarioError::NonPositiveParameter, "phi_c, phi_h, delta must be > 0");
    if (scenario.model.u_bar <= 0.0)
        fail(ScenarioError::NonPositiveParameter, "u_bar must be > 0");
    if (scenario.model.beta <= 0.0 || scenario.model.beta >= 1.0)
        fail(ScenarioError::NonPositiveParameter, "beta must be in (0,1)");
    if (scenario.alpha < 0.0 || scenario.alpha > 1.0)
        fail(ScenarioError::AlphaOutOfRange, "alpha must be in [0,1]");

    if (scenario.av.velocity < 0.0)
        fail(ScenarioError::NegativeVelocity, "AV velocity must be >= 0");
    if (scenario.av.position > scenario.control_zone_length)
        fail(ScenarioError::PositionBeyondMergePoint, "AV already past the merge point");

    for (int i = 0; i < scenario.hdv_count(); ++i) {
        const auto& hdv = scenario.hdvs[static_cast<size_t>(i)];
        std::ostringstream who;
        who << "HDV " << (i + 1);
        if (hdv.state.velocity < 0.0 || hdv.desired_speed <= 0.0)
            fail(ScenarioError::NegativeVelocity, who.str() + " speed must be positive");
        if (hdv.state.position > scenario.control_zone_length)
            fail(ScenarioError::PositionBeyondMergePoint, who.str() + " already past the merge point");
        // Every HDV is assumed to cruise at its desired speed from t0 on.
        if (hdv.state.velocity != hdv.desired_speed)
            fail(ScenarioError::SpeedMismatch, who.str() + " velocity differs from desired speed");
        if (i > 0) {
            const double ahead = scenario.hdvs[static_cast<size_t>(i - 1)].state.position;
            if (!(ahead > hdv.state.position))
                fail(ScenarioError::UnorderedHdvs,
                     who.str() + " not strictly behind its predecessor");
        }
    }
    return scenario;
}

std::optional<UniformPlatoon> uniform_platoon(const Scenario& scenario, double rel_tol) {
    const int n = scenario.hdv_count();
    if (n < 2) return std::nullopt;

    const double v_d = scenario.hdvs[0].desired_speed;
    const double spacing = scenario.hdvs[0].state.position - scenario.hdvs[1].state.position;
    for (int i = 0; i < n; ++i) {
        if (!close_rel(scenario.hdvs[static_cast<size_t>(i)].desired_speed, v_d, rel_tol))
            return std::nullopt;
        if (i > 0) {
            const double gap = scenario.hdvs[static_cast<size_t>(i - 1)].state.position -
                               scenario.hdvs[static_cast<size_t>(i)].state.position;
            if (!close_rel(gap, spacing, rel_tol)) return std::nullopt;
        }
    }
    return UniformPlatoon{spacing, v_d};
}

void require_hdv_index(int hdv_index, const Scenario& scenario) {
    if (hdv_index < 1 || hdv_index > scenario.hdv_count())
        throw std::out_of_range("hdv_index out of range");
}

void require_sequence_index(int k, const Scenario& scenario) {
    if (k < 1 || k > scenario.sequence_count())
        throw std::out_of_range("sequence index out of range");
}

}  // namespace avmerge
