// avmerge: merging-sequence solver CLI.
//   solve       pick the best merging slot and emit the plan
//   verify      randomized self-checks against the grid oracle
//   sweep-alpha cost landscape across the time/energy weight

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "avmerge/harness.hpp"
#include "avmerge/scenario_io.hpp"

namespace {

using namespace avmerge;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitNoPlan = 2;
constexpr int kExitPropertyFailure = 3;

struct GridSpec {
    int nt = 0;
    int nv = 0;
};

GridSpec parse_grid(const std::string& text) {
    const auto sep = text.find('x');
    if (sep == std::string::npos)
        throw CLI::ValidationError("--grid", "expected NTxNV, e.g. 64x64");
    GridSpec g;
    g.nt = std::stoi(text.substr(0, sep));
    g.nv = std::stoi(text.substr(sep + 1));
    if (g.nt < 2 || g.nv < 2) throw CLI::ValidationError("--grid", "grid must be >= 2x2");
    return g;
}

std::string pad(const std::string& s, size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size() + 1, ' ');
}

// Per-index table for a finished scan; J_A/J_H are the weighted AV and
// fleet shares of the total.
std::string scan_table(const Scenario& sc, const IndexScan& scan) {
    std::ostringstream out;
    out << pad("k", 4) << pad("window", 7) << pad("t_m", 13) << pad("v_m", 13)
        << pad("J_A", 13) << pad("J_H", 13) << pad("J", 13) << "feasible\n";
    const double alpha = sc.alpha;
    for (int k = 1; k <= sc.sequence_count(); ++k) {
        const auto& entry = scan.per_k[static_cast<size_t>(k - 1)];
        out << pad(std::to_string(k), 4);
        if (!entry) {
            out << pad("empty", 7) << pad("-", 13) << pad("-", 13) << pad("-", 13)
                << pad("-", 13) << pad("-", 13) << "-\n";
            continue;
        }
        const double j_av =
            alpha * entry->cost.av_time + (1.0 - alpha) * entry->cost.av_energy;
        const double j_hdv = alpha * (entry->cost.hdv.undisrupted_time_sum +
                                      entry->cost.hdv.time_disruption) +
                             (1.0 - alpha) * entry->cost.hdv.energy_disruption;
        const auto coeffs =
            solve_coefficients(sc.av.position, sc.av.velocity, sc.t0,
                               sc.control_zone_length, entry->v_m, entry->t_m);
        const bool ok = feasibility(coeffs, sc.limits).ok();
        out << pad("ok", 7) << pad(format_g(entry->t_m), 13) << pad(format_g(entry->v_m), 13)
            << pad(format_g(j_av), 13) << pad(format_g(j_hdv), 13)
            << pad(format_g(entry->cost.total(alpha)), 13) << (ok ? "yes" : "no") << "\n";
    }
    return out.str();
}

std::string fast_path_notes(const Scenario& sc, const SolveOptions& opts) {
    std::ostringstream out;
    try {
        const double v_star = shared_merge_velocity(sc, opts);
        const double a_lower = alpha_lower_threshold(sc, v_star);
        const double a_upper = alpha_upper_threshold(sc, v_star);
        out << "alpha_l: " << format_g(a_lower) << "\n";
        out << "alpha_u: " << format_g(a_upper) << "\n";
        if (sc.alpha > a_lower) {
            const double v_bound = uniform_velocity_bound(sc);
            const double d_t = base_time_disruption(sc.hdvs[0].desired_speed, v_bound,
                                                    sc.model.u_bar);
            const auto pick = time_optimal_index(sc, v_bound, d_t);
            out << "time-weighted fast path: "
                << (pick ? "k=" + std::to_string(*pick) : "inconclusive") << "\n";
        } else if (sc.alpha <= a_upper) {
            const auto last = optimize_index(sc.sequence_count(), sc, opts);
            const auto shortlist =
                last ? energy_optimal_shortlist(sc, last->t_m, last->v_m) : std::nullopt;
            if (shortlist)
                out << "energy-weighted shortlist: {" << shortlist->first << ", "
                    << shortlist->last << "}\n";
            else
                out << "energy-weighted shortlist: not applicable\n";
        } else {
            out << "fast paths: alpha between thresholds, full scan required\n";
        }
    } catch (const AssumptionViolated&) {
        out << "fast paths: not applicable (no uniform platoon)\n";
    } catch (const NoFeasiblePlan&) {
        out << "fast paths: not applicable\n";
    }
    return out.str();
}

int cmd_solve(const std::string& path, std::optional<double> alpha_override,
              std::optional<GridSpec> grid, std::optional<double> refine_tol,
              std::optional<std::string> fast_path, std::optional<std::string> out_dir,
              std::optional<double> dt) {
    ScenarioFile file = load_scenario_file(path);
    Scenario& sc = file.scenario;
    SolveOptions opts = file.solver.options;
    if (alpha_override) sc.alpha = *alpha_override;
    if (grid) {
        opts.grid_t = grid->nt;
        opts.grid_v = grid->nv;
    }
    if (refine_tol) opts.refine_tol = *refine_tol;
    if (fast_path) opts.fast_path = fast_path_from_string(*fast_path);
    const double sample_dt = dt ? *dt : file.solver.sample_dt;

    validate_scenario(sc);

    const IndexScan scan = scan_indices(sc, opts);
    const MergePlan plan = optimal_index(sc, opts);

    std::cout << "scenario: " << path << "\n";
    std::cout << "alpha: " << format_g(sc.alpha) << "  hdvs: " << sc.hdv_count() << "\n\n";
    std::cout << scan_table(sc, scan) << "\n";
    if (opts.fast_path != FastPathMode::Off) std::cout << fast_path_notes(sc, opts) << "\n";
    std::cout << "chosen: k=" << plan.k << "  t_m=" << format_g(plan.t_m)
              << "  v_m=" << format_g(plan.v_m)
              << "  J=" << format_g(plan.cost.total(sc.alpha)) << "\n";
    std::cout << "fallback_applied: " << (plan.fallback_applied ? "true" : "false") << "\n";
    for (const auto& skip : plan.skipped)
        std::cout << "skipped: k=" << skip.k << " ("
                  << (skip.reason == SkipReason::EmptyWindow ? "empty_window"
                                                             : "actuator_infeasible")
                  << ")\n";

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        std::ofstream plan_out(*out_dir + "/plan.yaml");
        plan_out << plan_to_text(plan, sc, &scan);
        std::ofstream csv_out(*out_dir + "/trajectory.csv");
        write_trajectory_csv(csv_out, plan.coeffs, sample_dt);
        std::cout << "wrote: " << *out_dir << "/plan.yaml, " << *out_dir
                  << "/trajectory.csv\n";
    }
    return kExitOk;
}

void print_suite(const SuiteResult& res, bool& all_ok) {
    std::cout << (res.ok() ? "[pass] " : "[FAIL] ") << res.name << ": " << res.passed << "/"
              << res.checked;
    if (!res.detail.empty()) std::cout << " (" << res.detail << ")";
    if (!res.failing_seeds.empty()) {
        std::cout << "  failing seeds:";
        for (size_t i = 0; i < res.failing_seeds.size() && i < 8; ++i)
            std::cout << " " << res.failing_seeds[i];
    }
    std::cout << "\n";
    all_ok = all_ok && res.ok();
}

int cmd_verify(std::optional<std::string> path, uint64_t seed0, int cases,
               std::optional<GridSpec> oracle_grid) {
    const int nt = oracle_grid ? oracle_grid->nt : 256;
    const int nv = oracle_grid ? oracle_grid->nv : 256;
    bool all_ok = true;

    if (path) {
        const ScenarioFile file = load_scenario_file(*path);
        const Scenario& sc = file.scenario;
        validate_scenario(sc);
        const MergePlan plan = optimal_index(sc, file.solver.options);
        const OracleResult oracle =
            brute_force(sc, file.solver.oracle_grid_t, file.solver.oracle_grid_v);

        SuiteResult agree;
        agree.name = "solver argmin vs grid oracle";
        agree.checked = 1;
        const bool match =
            plan.k == oracle.argmin_k ||
            (oracle.argmin_k > 0 &&
             std::abs(plan.cost.total(sc.alpha) - oracle.best().cost) <=
                 1e-4 * std::max(1.0, std::abs(oracle.best().cost)));
        agree.passed = match ? 1 : 0;
        print_suite(agree, all_ok);

        SuiteResult energy;
        energy.name = "plan energy closed form vs quadrature";
        energy.checked = 1;
        const double quad = energy_quadrature(plan.coeffs);
        energy.passed =
            std::abs(plan.cost.av_energy - quad) / std::max(1.0, quad) < 1e-9 ? 1 : 0;
        print_suite(energy, all_ok);

        SuiteResult audit;
        audit.name = "replay audit without violations";
        audit.checked = 1;
        const ReplayAudit rep = replay(plan, sc, 0.01);
        audit.passed = rep.violations.empty() ? 1 : 0;
        if (!rep.violations.empty()) audit.detail = rep.violations.front().constraint;
        print_suite(audit, all_ok);
    } else {
        print_suite(energy_equivalence_suite(seed0, std::max(cases * 10, 100)), all_ok);
        print_suite(boundary_residual_suite(seed0 + 1, std::max(cases * 10, 100)), all_ok);
        print_suite(window_soundness_suite(seed0 + 2, std::max(cases * 40, 400)), all_ok);
        print_suite(oracle_agreement_suite(seed0 + 3, cases, nt, nv), all_ok);
        print_suite(time_fastpath_suite(seed0 + 4, std::max(cases / 2, 5), nt, nv), all_ok);
        print_suite(energy_shortlist_suite(seed0 + 5, std::max(cases / 2, 5), nt, nv),
                    all_ok);
        print_suite(energy_monotonicity_suite(seed0 + 6, cases), all_ok);
        print_suite(alpha_regime_suite(seed0 + 7, std::max(cases / 5, 3)), all_ok);
    }
    std::cout << (all_ok ? "verify: all suites passed\n" : "verify: FAILURES\n");
    return all_ok ? kExitOk : kExitPropertyFailure;
}

int cmd_sweep_alpha(const std::string& path, const std::string& alphas_text,
                    std::optional<GridSpec> grid) {
    ScenarioFile file = load_scenario_file(path);
    SolveOptions opts = file.solver.options;
    if (grid) {
        opts.grid_t = grid->nt;
        opts.grid_v = grid->nv;
    }
    validate_scenario(file.scenario);

    std::vector<double> alphas;
    std::stringstream ss(alphas_text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        const double a = std::stod(token);
        if (a < 0.0 || a > 1.0)
            throw ValidationError(ScenarioError::AlphaOutOfRange,
                                  "sweep alpha outside [0,1]: " + token);
        alphas.push_back(a);
    }

    std::cout << pad("alpha", 13) << pad("k*", 4) << "J*\n";
    for (const double a : alphas) {
        Scenario probe = file.scenario;
        probe.alpha = a;
        const IndexScan scan = scan_indices(probe, opts);
        if (scan.argmin_k == 0) {
            std::cout << pad(format_g(a), 13) << pad("-", 4) << "no admissible index\n";
            continue;
        }
        const auto& best = *scan.per_k[static_cast<size_t>(scan.argmin_k - 1)];
        std::cout << pad(format_g(a), 13) << pad(std::to_string(scan.argmin_k), 4)
                  << format_g(best.cost.total(a)) << "\n";
    }
    try {
        const double v_star = shared_merge_velocity(file.scenario, opts);
        std::cout << "alpha_l: " << format_g(alpha_lower_threshold(file.scenario, v_star))
                  << "\n";
        std::cout << "alpha_u: " << format_g(alpha_upper_threshold(file.scenario, v_star))
                  << "\n";
    } catch (const AssumptionViolated&) {
        std::cout << "alpha thresholds: not applicable (no uniform platoon)\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal merging-sequence solver"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::optional<double> alpha_override;
    std::string grid_text;
    std::optional<double> refine_tol;
    std::string fast_path_text;
    std::string out_dir;
    std::optional<double> dt;

    auto* solve = app.add_subcommand("solve", "solve a scenario and print the plan");
    solve->add_option("scenario", scenario_path, "scenario file")->required();
    solve->add_option("--alpha", alpha_override, "override the time/energy weight");
    solve->add_option("--grid", grid_text, "solver grid, NTxNV");
    solve->add_option("--refine-tol", refine_tol, "refinement tolerance");
    solve->add_option("--fast-path", fast_path_text, "off|advisory|only");
    solve->add_option("--out", out_dir, "directory for plan.yaml and trajectory.csv");
    solve->add_option("--dt", dt, "trajectory sample step [s]");

    std::string verify_path;
    uint64_t seed0 = 20240901;
    int cases = 25;
    std::string oracle_grid_text;

    auto* verify = app.add_subcommand("verify", "randomized self-checks");
    verify->add_option("scenario", verify_path, "optional single scenario to check");
    verify->add_option("--seed0", seed0, "base seed");
    verify->add_option("--cases", cases, "cases per randomized suite");
    verify->add_option("--grid", oracle_grid_text, "oracle grid, NTxNV");

    std::string sweep_path;
    std::string alphas_text = "0,0.25,0.5,0.75,1";
    std::string sweep_grid_text;

    auto* sweep = app.add_subcommand("sweep-alpha", "argmin across alpha values");
    sweep->add_option("scenario", sweep_path, "scenario file")->required();
    sweep->add_option("--alphas", alphas_text, "comma-separated alpha grid");
    sweep->add_option("--grid", sweep_grid_text, "solver grid, NTxNV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (solve->parsed()) {
            std::optional<GridSpec> grid;
            if (!grid_text.empty()) grid = parse_grid(grid_text);
            std::optional<std::string> fast_path;
            if (!fast_path_text.empty()) fast_path = fast_path_text;
            std::optional<std::string> out;
            if (!out_dir.empty()) out = out_dir;
            return cmd_solve(scenario_path, alpha_override, grid, refine_tol, fast_path,
                             out, dt);
        }
        if (verify->parsed()) {
            std::optional<std::string> path;
            if (!verify_path.empty()) path = verify_path;
            std::optional<GridSpec> grid;
            if (!oracle_grid_text.empty()) grid = parse_grid(oracle_grid_text);
            return cmd_verify(path, seed0, cases, grid);
        }
        if (sweep->parsed()) {
            std::optional<GridSpec> grid;
            if (!sweep_grid_text.empty()) grid = parse_grid(sweep_grid_text);
            return cmd_sweep_alpha(sweep_path, alphas_text, grid);
        }
    } catch (const NoFeasiblePlan& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoPlan;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const ScenarioParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
