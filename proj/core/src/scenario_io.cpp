#include "avmerge/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace avmerge {

namespace {

double require_double(const YAML::Node& node, const char* key) {
    if (!node[key]) throw ScenarioParseError(std::string("missing field: ") + key);
    try {
        return node[key].as<double>();
    } catch (const YAML::Exception&) {
        throw ScenarioParseError(std::string("not a number: ") + key);
    }
}

double optional_double(const YAML::Node& node, const char* key, double fallback) {
    if (!node || !node[key]) return fallback;
    return require_double(node, key);
}

int optional_int(const YAML::Node& node, const char* key, int fallback) {
    if (!node || !node[key]) return fallback;
    try {
        return node[key].as<int>();
    } catch (const YAML::Exception&) {
        throw ScenarioParseError(std::string("not an integer: ") + key);
    }
}

}  // namespace

const char* to_string(FastPathMode mode) {
    switch (mode) {
        case FastPathMode::Off: return "off";
        case FastPathMode::Advisory: return "advisory";
        case FastPathMode::Only: return "only";
    }
    return "off";
}

FastPathMode fast_path_from_string(const std::string& text) {
    if (text == "off") return FastPathMode::Off;
    if (text == "advisory") return FastPathMode::Advisory;
    if (text == "only") return FastPathMode::Only;
    throw ScenarioParseError("fast_path must be one of off|advisory|only, got: " + text);
}

ScenarioFile parse_scenario_text(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ScenarioParseError(std::string("invalid scenario file: ") + e.what());
    }
    if (!root.IsMap()) throw ScenarioParseError("scenario file must be a mapping");

    ScenarioFile file;
    Scenario& sc = file.scenario;
    sc.t0 = require_double(root, "t0");
    sc.control_zone_length = require_double(root, "control_zone_length");
    sc.alpha = require_double(root, "alpha");

    const YAML::Node av = root["av"];
    if (!av || !av.IsMap()) throw ScenarioParseError("missing mapping: av");
    sc.av.position = require_double(av, "position");
    sc.av.velocity = require_double(av, "velocity");

    const YAML::Node hdvs = root["hdvs"];
    if (!hdvs || !hdvs.IsSequence()) throw ScenarioParseError("missing sequence: hdvs");
    for (const auto& entry : hdvs) {
        HdvObservation hdv;
        hdv.state.position = require_double(entry, "position");
        hdv.state.velocity = require_double(entry, "velocity");
        hdv.desired_speed = require_double(entry, "desired_speed");
        sc.hdvs.push_back(hdv);
    }

    const YAML::Node limits = root["limits"];
    if (!limits || !limits.IsMap()) throw ScenarioParseError("missing mapping: limits");
    sc.limits.v_min = require_double(limits, "v_min");
    sc.limits.v_max = require_double(limits, "v_max");
    sc.limits.u_min = require_double(limits, "u_min");
    sc.limits.u_max = require_double(limits, "u_max");
    sc.limits.phi_c = require_double(limits, "phi_c");
    sc.limits.phi_h = require_double(limits, "phi_h");
    sc.limits.delta = require_double(limits, "delta");

    const YAML::Node model = root["model"];
    if (!model || !model.IsMap()) throw ScenarioParseError("missing mapping: model");
    sc.model.u_bar = require_double(model, "u_bar");
    sc.model.beta = require_double(model, "beta");

    const YAML::Node solver = root["solver"];
    SolverConfig& cfg = file.solver;
    cfg.options.grid_t = optional_int(solver, "grid_t", cfg.options.grid_t);
    cfg.options.grid_v = optional_int(solver, "grid_v", cfg.options.grid_v);
    cfg.options.refine_tol = optional_double(solver, "refine_tol", cfg.options.refine_tol);
    if (solver && solver["fast_path"])
        cfg.options.fast_path = fast_path_from_string(solver["fast_path"].as<std::string>());
    cfg.oracle_grid_t = optional_int(solver, "oracle_grid_t", cfg.oracle_grid_t);
    cfg.oracle_grid_v = optional_int(solver, "oracle_grid_v", cfg.oracle_grid_v);
    cfg.sample_dt = optional_double(solver, "dt", cfg.sample_dt);
    return file;
}

ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioParseError("cannot open scenario file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_scenario_text(buffer.str());
    } catch (const ScenarioParseError& e) {
        throw ScenarioParseError(path + ": " + e.what());
    }
}

std::string format_g(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    return buf;
}

namespace {

// 17 significant digits round-trip any double through text exactly.
YAML::Emitter& lossless(YAML::Emitter& out) {
    out.SetDoublePrecision(17);
    out.SetFloatPrecision(17);
    return out;
}

}  // namespace

std::string scenario_to_text(const Scenario& sc) {
    YAML::Emitter out;
    lossless(out);
    out << YAML::BeginMap;
    out << YAML::Key << "t0" << YAML::Value << sc.t0;
    out << YAML::Key << "control_zone_length" << YAML::Value << sc.control_zone_length;
    out << YAML::Key << "alpha" << YAML::Value << sc.alpha;
    out << YAML::Key << "av" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "position" << YAML::Value << sc.av.position;
    out << YAML::Key << "velocity" << YAML::Value << sc.av.velocity;
    out << YAML::EndMap;
    out << YAML::Key << "hdvs" << YAML::Value << YAML::BeginSeq;
    for (const auto& hdv : sc.hdvs) {
        out << YAML::BeginMap;
        out << YAML::Key << "position" << YAML::Value << hdv.state.position;
        out << YAML::Key << "velocity" << YAML::Value << hdv.state.velocity;
        out << YAML::Key << "desired_speed" << YAML::Value << hdv.desired_speed;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "limits" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "v_min" << YAML::Value << sc.limits.v_min;
    out << YAML::Key << "v_max" << YAML::Value << sc.limits.v_max;
    out << YAML::Key << "u_min" << YAML::Value << sc.limits.u_min;
    out << YAML::Key << "u_max" << YAML::Value << sc.limits.u_max;
    out << YAML::Key << "phi_c" << YAML::Value << sc.limits.phi_c;
    out << YAML::Key << "phi_h" << YAML::Value << sc.limits.phi_h;
    out << YAML::Key << "delta" << YAML::Value << sc.limits.delta;
    out << YAML::EndMap;
    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "u_bar" << YAML::Value << sc.model.u_bar;
    out << YAML::Key << "beta" << YAML::Value << sc.model.beta;
    out << YAML::EndMap;
    out << YAML::EndMap;

    std::string text = "# avmerge scenario\n# units: SI (m, m/s, m/s^2, s)\n";
    text += out.c_str();
    text += "\n";
    return text;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryCoefficients& coeffs,
                          double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("trajectory csv: dt must be > 0");
    out << "t,x,v,u\n";
    const double t_end = coeffs.valid_to;
    for (double t = coeffs.valid_from;; t += dt) {
        const bool last = t >= t_end - 1e-12;
        const double tt = last ? t_end : t;
        const Kinematics k = eval(coeffs, tt);
        out << format_g(tt) << ',' << format_g(k.x) << ',' << format_g(k.v) << ','
            << format_g(k.u) << '\n';
        if (last) break;
    }
}

std::string plan_to_text(const MergePlan& plan, const Scenario& scenario,
                         const IndexScan* scan) {
    std::ostringstream out;
    const double alpha = scenario.alpha;
    if (scan) {
        out << "per_index:\n";
        for (int k = 1; k <= scenario.sequence_count(); ++k) {
            const auto& entry = scan->per_k[static_cast<size_t>(k - 1)];
            out << "  - k: " << k << "\n";
            if (!entry) {
                out << "    window: empty\n";
                continue;
            }
            out << "    window: ok\n";
            out << "    t_m: " << format_g(entry->t_m) << "\n";
            out << "    v_m: " << format_g(entry->v_m) << "\n";
            out << "    total: " << format_g(entry->cost.total(alpha)) << "\n";
        }
    }
    out << "plan:\n";
    out << "  k: " << plan.k << "\n";
    out << "  t_m: " << format_g(plan.t_m) << "\n";
    out << "  v_m: " << format_g(plan.v_m) << "\n";
    out << "  travel_time: " << format_g(plan.cost.av_time) << "\n";
    out << "  cost:\n";
    out << "    total: " << format_g(plan.cost.total(alpha)) << "\n";
    out << "    av_time: " << format_g(plan.cost.av_time) << "\n";
    out << "    av_energy: " << format_g(plan.cost.av_energy) << "\n";
    out << "    hdv_undisrupted_time: " << format_g(plan.cost.hdv.undisrupted_time_sum)
        << "\n";
    out << "    hdv_time_disruption: " << format_g(plan.cost.hdv.time_disruption) << "\n";
    out << "    hdv_energy_disruption: " << format_g(plan.cost.hdv.energy_disruption)
        << "\n";
    out << "  coefficients:\n";
    out << "    a0: " << format_g(plan.coeffs.a0) << "\n";
    out << "    b0: " << format_g(plan.coeffs.b0) << "\n";
    out << "    c0: " << format_g(plan.coeffs.c0) << "\n";
    out << "    d0: " << format_g(plan.coeffs.d0) << "\n";
    out << "  feasible:\n";
    out << "    speed_ok: " << (plan.feasibility.speed_ok ? "true" : "false") << "\n";
    out << "    accel_ok: " << (plan.feasibility.accel_ok ? "true" : "false") << "\n";
    out << "    v_range: [" << format_g(plan.feasibility.v_low) << ", "
        << format_g(plan.feasibility.v_high) << "]\n";
    out << "    u_range: [" << format_g(plan.feasibility.u_low) << ", "
        << format_g(plan.feasibility.u_high) << "]\n";
    out << "  fallback_applied: " << (plan.fallback_applied ? "true" : "false") << "\n";
    out << "  skipped_indices:";
    if (plan.skipped.empty()) {
        out << " []\n";
    } else {
        out << "\n";
        for (const auto& skip : plan.skipped) {
            out << "    - k: " << skip.k << "\n";
            out << "      reason: "
                << (skip.reason == SkipReason::EmptyWindow ? "empty_window"
                                                           : "actuator_infeasible")
                << "\n";
        }
    }
    return out.str();
}

}  // namespace avmerge
