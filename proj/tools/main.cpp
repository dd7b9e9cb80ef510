// Command-line front end for the mean-field LQ solver library.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mflq/config_io.hpp"
#include "mflq/epsilon.hpp"
#include "mflq/montecarlo.hpp"
#include "mflq/num_format.hpp"
#include "mflq/oracle.hpp"
#include "mflq/report_io.hpp"

using namespace mflq;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolverFailure = 2;

struct CommonOptions {
    std::string config_path;
    int grid_steps = 0;  // 0 = config default
    long paths = 100000;
    std::uint64_t seed = 12345;
    std::vector<double> epsilon_list{1.0, 0.3, 0.1, 0.03, 0.01};
    std::string output_dir = ".";
    std::string format = "both";
    long dump_paths = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "problem config file")->required();
    cmd->add_option("--grid-steps", opt.grid_steps, "override the solver grid resolution");
    cmd->add_option("--paths", opt.paths, "Monte Carlo path count");
    cmd->add_option("--seed", opt.seed, "Monte Carlo seed");
    cmd->add_option("--epsilon-list", opt.epsilon_list, "regularization schedule (decreasing)")
        ->delimiter(',');
    cmd->add_option("--output-dir", opt.output_dir, "directory for CSV/JSON artifacts");
    cmd->add_option("--format", opt.format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_option("--dump-paths", opt.dump_paths, "also dump this many simulated paths");
}

struct Workspace {
    ProblemConfig config;
    ValidatedProblem vp;
    TimeGrid grid;
    bool write_csv;
    std::filesystem::path out;
    json summary;
};

Workspace open_workspace(const CommonOptions& opt, const std::string& command) {
    ProblemConfig config = load_problem_config(opt.config_path);
    const int steps = opt.grid_steps > 0 ? opt.grid_steps : config.default_steps;
    TimeGrid grid(config.spec.grid.t0, config.spec.grid.T, steps % 2 == 0 ? steps : steps + 1);
    config.spec.grid = grid;
    ValidatedProblem vp = validate_problem(config.spec);
    std::filesystem::create_directories(opt.output_dir);
    Workspace ws{std::move(config), std::move(vp), grid, opt.format != "json",
                 std::filesystem::path(opt.output_dir), json::object()};
    ws.summary["command"] = command;
    ws.summary["config"] = opt.config_path;
    ws.summary["grid"] = {{"t0", grid.t0}, {"T", grid.T}, {"steps", grid.n_steps}};
    return ws;
}

void finish(Workspace& ws) {
    std::ofstream out(ws.out / "summary.json");
    out << ws.summary.dump(2) << "\n";
    std::printf("%s\n", ws.summary.dump(2).c_str());
}

json failure_json(const RiccatiFailure& f) {
    return {{"kind", to_string(f.kind)}, {"time", f.time}, {"value", f.value}};
}

json condition_json(const ConditionReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations)
        violations.push_back({{"clause", v.clause}, {"time", v.time}, {"value", v.value}});
    return {{"holds", report.holds}, {"delta", report.delta}, {"violations", violations}};
}

int run_check(const CommonOptions& opt) {
    Workspace ws = open_workspace(opt, "check");
    ws.summary["classic_condition"] = condition_json(check_classic_condition(ws.vp));
    ws.summary["standard_condition"] = condition_json(check_standard_condition(ws.vp));
    const RiccatiOutcome outcome = solve_riccati(ws.vp, ws.grid);
    if (outcome.ok()) {
        ws.summary["riccati"] = {{"solvable", true},
                                 {"delta0", outcome.solution->delta0},
                                 {"deltaSigma", outcome.solution->deltaSigma}};
    } else {
        ws.summary["riccati"] = {{"solvable", false}, {"failure", failure_json(*outcome.failure)}};
    }
    finish(ws);
    return outcome.ok() ? kExitOk : kExitSolverFailure;
}

int run_solve(const CommonOptions& opt) {
    Workspace ws = open_workspace(opt, "solve");
    const RiccatiOutcome outcome = solve_riccati(ws.vp, ws.grid);
    if (!outcome.ok()) {
        ws.summary["riccati"] = {{"solvable", false}, {"failure", failure_json(*outcome.failure)}};
        finish(ws);
        return kExitSolverFailure;
    }
    const RiccatiSolution& sol = *outcome.solution;
    const GainSet gains = feedback_gains(ws.vp, sol.P, sol.Pi);
    ws.summary["riccati"] = {{"solvable", true},
                             {"delta0", sol.delta0},
                             {"deltaSigma", sol.deltaSigma},
                             {"strongly_regular", sol.strongly_regular},
                             {"sigma_positive", sol.sigma_positive},
                             {"P_t0", sol.P.front()(0, 0)},
                             {"Pi_t0", sol.Pi.front()(0, 0)}};
    if (ws.write_csv) {
        write_riccati_csv((ws.out / "riccati.csv").string(), sol);
        // gains per node
        std::ofstream out(ws.out / "gains.csv");
        out << "s";
        for (int i = 0; i < ws.vp.m(); ++i)
            for (int j = 0; j < ws.vp.n(); ++j) out << ",Theta_" << i << j;
        for (int i = 0; i < ws.vp.m(); ++i)
            for (int j = 0; j < ws.vp.n(); ++j) out << ",ThetaBar_" << i << j;
        out << "\n";
        for (int k = 0; k <= ws.grid.n_steps; ++k) {
            const double s = ws.grid.node(k);
            out << format_double(s);
            const Matrix th = gains.Theta.eval(s);
            const Matrix tb = gains.ThetaBar.eval(s);
            for (int i = 0; i < th.rows(); ++i)
                for (int j = 0; j < th.cols(); ++j) out << "," << format_double(th(i, j));
            for (int i = 0; i < tb.rows(); ++i)
                for (int j = 0; j < tb.cols(); ++j) out << "," << format_double(tb(i, j));
            out << "\n";
        }
    }
    finish(ws);
    return kExitOk;
}

int run_value(const CommonOptions& opt) {
    Workspace ws = open_workspace(opt, "value");
    const RiccatiOutcome outcome = solve_riccati(ws.vp, ws.grid);
    if (!outcome.ok()) {
        ws.summary["riccati"] = {{"solvable", false}, {"failure", failure_json(*outcome.failure)}};
        finish(ws);
        return kExitSolverFailure;
    }
    const RiccatiSolution& sol = *outcome.solution;
    const GainSet gains = feedback_gains(ws.vp, sol.P, sol.Pi);
    const AuxiliarySolution aux = make_auxiliary(ws.vp, sol, gains);
    const double value = value_at(ws.vp, sol.P, sol.Pi, aux, ws.config.initial);
    const AffineControlLaw law = optimal_law(gains, aux);
    const double cost = exact_cost(ws.vp, law, ws.config.initial, ws.grid);
    ws.summary["value"] = value;
    ws.summary["optimal_law_cost"] = cost;
    ws.summary["consistency_gap"] = std::abs(value - cost);
    if (ws.write_csv) write_aux_csv((ws.out / "aux.csv").string(), aux, ws.grid);
    finish(ws);
    return kExitOk;
}

int run_simulate(const CommonOptions& opt) {
    Workspace ws = open_workspace(opt, "simulate");
    const RiccatiOutcome outcome = solve_riccati(ws.vp, ws.grid);
    if (!outcome.ok()) {
        ws.summary["riccati"] = {{"solvable", false}, {"failure", failure_json(*outcome.failure)}};
        finish(ws);
        return kExitSolverFailure;
    }
    const GainSet gains = feedback_gains(ws.vp, outcome.solution->P, outcome.solution->Pi);
    const AuxiliarySolution aux = make_auxiliary(ws.vp, *outcome.solution, gains);
    const AffineControlLaw law = optimal_law(gains, aux);

    SimConfig cfg;
    cfg.n_paths = opt.paths;
    cfg.seed = opt.seed;
    cfg.grid = ws.grid;
    const auto t0 = std::chrono::steady_clock::now();
    const CostEstimate est = estimate_cost(ws.vp, law, ws.config.initial, cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double exact = exact_cost(ws.vp, law, ws.config.initial, ws.grid);
    const MomentPath moments = propagate_moments(ws.vp, law, ws.config.initial, ws.grid);

    ws.summary["estimate"] = {{"mean", est.mean},
                              {"std_error", est.std_error},
                              {"n_paths", est.n_paths},
                              {"seed", opt.seed},
                              {"seconds", seconds}};
    ws.summary["exact_cost"] = exact;
    ws.summary["deviation_in_std_errors"] =
        est.std_error > 0.0 ? std::abs(est.mean - exact) / est.std_error : 0.0;
    if (ws.write_csv) {
        write_moments_csv((ws.out / "moments.csv").string(), ws.vp, law, moments);
        if (opt.dump_paths > 1) {
            SimConfig dump_cfg = cfg;
            dump_cfg.n_paths = opt.dump_paths;
            write_paths_csv((ws.out / "paths.csv").string(),
                            simulate_paths(ws.vp, law, ws.config.initial, dump_cfg));
        }
    }
    finish(ws);
    return kExitOk;
}

int run_sweep(const CommonOptions& opt) {
    Workspace ws = open_workspace(opt, "sweep-epsilon");
    std::vector<double> schedule = opt.epsilon_list;
    const EpsilonReport report =
        diagnose_solvability(ws.vp, ws.config.initial, schedule, ws.grid);
    ws.summary["verdict"] = to_string(report.verdict);
    json entries = json::array();
    for (const EpsilonEntry& e : report.entries) {
        json j = {{"epsilon", e.epsilon}, {"riccati_ok", e.riccati_ok}};
        if (e.riccati_ok) {
            j["V"] = e.value;
            j["control_norm"] = e.norm;
            j["delta0"] = e.delta0;
            j["deltaSigma"] = e.deltaSigma;
        } else {
            j["failure"] = failure_json(*e.failure);
        }
        entries.push_back(j);
    }
    ws.summary["entries"] = entries;
    if (report.base) {
        ws.summary["base"] = {{"riccati_ok", report.base->riccati_ok}};
        if (report.base->riccati_ok) ws.summary["base"]["V"] = report.base->value;
    }
    if (report.limit_control) {
        ws.summary["limit_control_t0"] = report.limit_control->front()(0);
        ws.summary["limit_control_T"] = report.limit_control->back()(0);
    }
    if (ws.write_csv) write_epsilon_csv((ws.out / "epsilon.csv").string(), report);
    finish(ws);
    const bool ok = report.verdict == SolvabilityVerdict::UniformlyConvex ||
                    report.verdict == SolvabilityVerdict::Solvable;
    return ok ? kExitOk : kExitSolverFailure;
}

int run_oracle(const CommonOptions& opt) {
    Workspace ws = open_workspace(opt, "oracle");
    const RiccatiOutcome outcome = solve_riccati(ws.vp, ws.grid);
    if (!outcome.ok()) {
        ws.summary["riccati"] = {{"solvable", false}, {"failure", failure_json(*outcome.failure)}};
        finish(ws);
        return kExitSolverFailure;
    }
    const GainSet gains = feedback_gains(ws.vp, outcome.solution->P, outcome.solution->Pi);
    const AuxiliarySolution aux = make_auxiliary(ws.vp, *outcome.solution, gains);
    const double value =
        value_at(ws.vp, outcome.solution->P, outcome.solution->Pi, aux, ws.config.initial);
    const AffineControlLaw law = optimal_law(gains, aux);
    const double feedback_cost = exact_cost(ws.vp, law, ws.config.initial, ws.grid);

    const BruteForceResult bf = brute_force_minimize(ws.vp, ws.config.initial, ws.grid);
    ws.summary["value"] = value;
    ws.summary["feedback_cost"] = feedback_cost;
    ws.summary["brute_force_min"] = bf.cost;
    ws.summary["brute_force_evaluations"] = bf.evaluations;
    ws.summary["gap"] = bf.cost - value;
    finish(ws);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean-field stochastic LQ optimal control solver"};
    app.require_subcommand(1);

    CommonOptions opt;
    auto* check = app.add_subcommand("check", "solvability conditions and Riccati diagnosis");
    auto* solve = app.add_subcommand("solve", "Riccati paths, margins and feedback gains");
    auto* value = app.add_subcommand("value", "value function and auxiliary paths");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate vs exact cost");
    auto* sweep = app.add_subcommand("sweep-epsilon", "regularization sweep and verdict");
    auto* oracle = app.add_subcommand("oracle", "brute-force optimizer cross-check");
    for (auto* cmd : {check, solve, value, simulate, sweep, oracle}) add_common(cmd, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(check)) return run_check(opt);
        if (app.got_subcommand(solve)) return run_solve(opt);
        if (app.got_subcommand(value)) return run_value(opt);
        if (app.got_subcommand(simulate)) return run_simulate(opt);
        if (app.got_subcommand(sweep)) return run_sweep(opt);
        if (app.got_subcommand(oracle)) return run_oracle(opt);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
